#pragma once

// The experiment harness behind the `superx` command line tool. Each command
// is a pure function of (config, seed) to the files it writes.

#include "superx/config.hpp"
#include "superx/fdd.hpp"
#include "superx/gauss.hpp"
#include "superx/stattest.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace superx {

enum ExitCode : int {
  kExitOk = 0,
  kExitTestFailure = 1,
  kExitConfigError = 2,
  kExitNumericalError = 3,
};

/// One row of the convergence table: n P[X_n in A] next to nu(A).
struct ConvergenceRow {
  std::int64_t n = 0;
  std::size_t set_index = 0;
  ExceedanceSet set;
  Estimate scaled_probability;  ///< n P[X_n in A]
  Estimate exponent;            ///< nu(A)
};

std::vector<ConvergenceRow> convergence_table(const RunConfig& cfg);

/// Reports produced by the stattest suite for a config.
std::vector<TestReport> test_suite(const RunConfig& cfg);

struct FddComparison {
  FddQuery query;
  FddResult theoretical;
  Estimate empirical;
  std::size_t realizations = 0;
};

FddComparison fdd_comparison(const RunConfig& cfg, const FddQuery& query);

/// Writers. Each creates `out` if needed, writes resolved_config.json and
/// its own payload files, and returns the list of files written.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_convergence(const RunConfig& cfg, const std::filesystem::path& out);
/// Returns kExitTestFailure when any gating report fails.
int cmd_test(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
std::vector<std::filesystem::path> cmd_fdd(const RunConfig& cfg, const FddQuery& query,
                                           const std::filesystem::path& out);

/// Full command line entry point; maps exceptions to exit codes.
int run_cli(int argc, char** argv);

}  // namespace superx
