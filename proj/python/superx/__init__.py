"""Superextremal processes: simulation, exponent measures and property tests."""

import json as _json

from ._superx import *  # noqa: F401,F403
from ._superx import (
    convergence as _convergence,
    fdd as _fdd,
    resolve_config as _resolve_config,
    run_tests as _run_tests,
    simulate as _simulate,
)

__version__ = "0.1.0"


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def resolve_config(config):
    """Resolved run configuration (all defaults filled in) as a dict."""
    return _json.loads(_resolve_config(_text(config)))


def simulate(config, out):
    return _simulate(_text(config), out)


def convergence(config, out):
    return _convergence(_text(config), out)


def run_tests(config, out):
    """Returns (exit_code, log)."""
    return _run_tests(_text(config), out)


def fdd(config, times, sites, thresholds, out):
    return _fdd(_text(config), times, sites, thresholds, out)
