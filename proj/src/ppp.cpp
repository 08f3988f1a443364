#include "superx/ppp.hpp"

#include "superx/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace superx {

Atom polar_atom(const SampleFunction& raw, double time) {
  if (raw.size() == 0) throw ArgumentError("cannot decompose an empty function");
  if (!raw.allFinite() || (raw.array() < 0.0).any())
    throw NumericalError("raw atom function must be finite and nonnegative");
  const double norm = raw.maxCoeff();
  if (!(norm > 0.0)) throw NumericalError("raw atom function must be nonzero");
  return Atom{norm, raw / norm, time};
}

std::size_t PointMeasure::sites() const {
  return atoms.empty() ? 0 : static_cast<std::size_t>(atoms.front().spectral.size());
}

void PointMeasure::validate() const {
  const std::size_t length = sites();
  std::vector<double> times;
  times.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (static_cast<std::size_t>(a.spectral.size()) != length)
      throw ArgumentError("atoms must share one spectral length");
    if (!(a.magnitude > 0.0) || !std::isfinite(a.magnitude))
      throw ArgumentError("atom magnitude must be positive and finite");
    if ((a.spectral.array() < 0.0).any() || std::abs(a.spectral.maxCoeff() - 1.0) > 1e-12)
      throw ArgumentError("atom spectral function must be nonnegative with unit sup norm");
    if (!(a.time >= 0.0 && a.time <= horizon)) throw ArgumentError("atom time outside [0, horizon]");
    times.push_back(a.time);
  }
  std::sort(times.begin(), times.end());
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] - times[k - 1] <= 1e-15) throw ArgumentError("atom times must be pairwise distinct");
}

DegenerateSpectral::DegenerateSpectral(std::size_t sites, double alpha) : sites_(sites), alpha_(alpha) {
  if (sites < 1) throw ArgumentError("spectral sampler needs at least one site");
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be > 0");
}

void DegenerateSpectral::draw(Rng&, Eigen::Ref<Eigen::VectorXd> out) const { out.setOnes(); }

BrownResnickSpectral::BrownResnickSpectral(const Grid& grid, const Variogram& variogram, double alpha)
    : increments_(grid, variogram),
      drift_(0.5 * variogram_matrix(grid, variogram).col(static_cast<Eigen::Index>(grid.origin_index()))),
      alpha_(alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be > 0");
}

void BrownResnickSpectral::draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  increments_.draw(rng, out);
  out = (out - drift_).array().exp().matrix();
  if (!out.allFinite()) throw NumericalError("spectral draw is not finite");
}

PointMeasure sample_ppp(const SpectralSampler& sampler, double horizon, std::size_t count, Rng& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon must be positive");
  if (count < 1) throw ArgumentError("atom count K must be >= 1");
  const double alpha = sampler.alpha();
  if (!(alpha > 0.0)) throw ArgumentError("alpha must be > 0");

  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> uniform_time(0.0, horizon);
  PointMeasure pm;
  pm.horizon = horizon;
  pm.truncation_count = count;
  pm.atoms.reserve(count);
  Eigen::VectorXd v(static_cast<Eigen::Index>(sampler.size()));
  double arrival = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    arrival += unit_exp(rng);
    const double radius = std::pow(arrival / horizon, -1.0 / alpha);
    const double time = uniform_time(rng);
    sampler.draw(rng, v);
    pm.atoms.push_back(polar_atom(radius * v, time));
    pm.radial_floor = radius;
    pm.profile_max = std::max(pm.profile_max, v.maxCoeff());
  }

  // Times must be pairwise distinct; collisions have probability zero but
  // are resampled if floating point produces one.
  std::vector<std::size_t> order(count);
  for (;;) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pm.atoms[a].time < pm.atoms[b].time; });
    bool clean = true;
    for (std::size_t k = 1; k < count; ++k) {
      auto& later = pm.atoms[order[k]];
      if (later.time - pm.atoms[order[k - 1]].time <= 1e-15) {
        later.time = uniform_time(rng);
        clean = false;
      }
    }
    if (clean) break;
  }
  return pm;
}

PointMeasure sample_ppp(const SpectralSampler& sampler, double horizon, std::size_t count,
                        std::uint64_t seed, std::uint32_t channel, std::uint32_t index) {
  Rng rng = substream(seed, channel, index);
  return sample_ppp(sampler, horizon, count, rng);
}

double truncation_bound(const PointMeasure& pm) { return pm.radial_floor * pm.profile_max; }

SampleFunction theta_map(const PointMeasure& pm, std::size_t sites) {
  const std::size_t length = pm.atoms.empty() ? sites : pm.sites();
  SampleFunction out = SampleFunction::Zero(static_cast<Eigen::Index>(length));
  for (const auto& a : pm.atoms) out = out.cwiseMax(a.magnitude * a.spectral);
  return out;
}

CadlagMaxProcess theta_tilde_map(const PointMeasure& pm, std::span<const double> time_grid,
                                 std::size_t sites) {
  for (std::size_t k = 1; k < time_grid.size(); ++k)
    if (!(time_grid[k] >= time_grid[k - 1])) throw ArgumentError("time grid must be sorted");
  for (double u : time_grid)
    if (!(u >= 0.0 && u <= pm.horizon)) throw ArgumentError("query time outside [0, horizon]");

  const std::size_t length = pm.atoms.empty() ? sites : pm.sites();
  std::vector<std::size_t> order(pm.atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pm.atoms[a].time < pm.atoms[b].time; });

  CadlagMaxProcess out;
  out.times.assign(time_grid.begin(), time_grid.end());
  out.values.resize(static_cast<Eigen::Index>(time_grid.size()), static_cast<Eigen::Index>(length));
  SampleFunction running = SampleFunction::Zero(static_cast<Eigen::Index>(length));
  std::size_t next = 0;
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    for (; next < order.size() && pm.atoms[order[next]].time <= time_grid[k]; ++next) {
      const auto& a = pm.atoms[order[next]];
      running = running.cwiseMax(a.magnitude * a.spectral);
    }
    out.values.row(static_cast<Eigen::Index>(k)) = running.transpose();
  }
  return out;
}

std::vector<double> order_stats(const PointMeasure& pm, std::size_t ranks, double u, std::size_t site) {
  std::vector<double> active;
  active.reserve(pm.atoms.size());
  for (const auto& a : pm.atoms) {
    if (site >= static_cast<std::size_t>(a.spectral.size())) throw ArgumentError("site out of range");
    if (a.time <= u) active.push_back(a.value(site));
  }
  return top_values(active, ranks);
}

double order_stat_map(const PointMeasure& pm, std::size_t rank, double u, std::size_t site) {
  if (rank < 1) throw ArgumentError("rank must be >= 1");
  return order_stats(pm, rank, u, site).back();
}

void write_point_measure_jsonl(std::ostream& out, const PointMeasure& pm, std::int64_t realization) {
  for (const auto& a : pm.atoms) {
    nlohmann::ordered_json line;
    if (realization >= 0) line["realization"] = realization;
    line["r"] = a.magnitude;
    line["u"] = a.time;
    line["s"] = std::vector<double>(a.spectral.data(), a.spectral.data() + a.spectral.size());
    out << line.dump() << '\n';
  }
}

PointMeasure read_point_measure_jsonl(std::istream& in, double horizon) {
  PointMeasure pm;
  pm.horizon = horizon;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto s = j.at("s").get<std::vector<double>>();
    Atom a;
    a.magnitude = j.at("r").get<double>();
    a.time = j.at("u").get<double>();
    a.spectral = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    pm.atoms.push_back(std::move(a));
  }
  pm.truncation_count = pm.atoms.size();
  pm.validate();
  return pm;
}

}  // namespace superx
