#include "superx/fdd.hpp"

#include "superx/detail/moments.hpp"
#include "superx/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace superx {

void FddQuery::validate() const {
  if (times.empty()) throw ArgumentError("fdd query needs at least one time");
  if (sites.empty()) throw ArgumentError("fdd query needs at least one site");
  if (!(times.front() > 0.0)) throw ArgumentError("fdd query times must be positive");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ArgumentError("fdd query times must be strictly increasing");
  if (thresholds.rows() != static_cast<Eigen::Index>(times.size()) ||
      thresholds.cols() != static_cast<Eigen::Index>(sites.size()))
    throw ArgumentError("threshold matrix must be times x sites");
  if (!(thresholds.array() > 0.0).all() || !thresholds.allFinite())
    throw ArgumentError("fdd thresholds must be positive and finite");
}

void FddQuery::validate(const Grid& grid) const {
  validate();
  for (auto s : sites) grid.check_site(s);
}

FddQuery fdd_query_from_json(const nlohmann::json& j) {
  FddQuery q;
  try {
    q.times = j.at("times").get<std::vector<double>>();
    q.sites = j.at("sites").get<std::vector<std::size_t>>();
    const auto rows = j.at("thresholds").get<std::vector<std::vector<double>>>();
    q.thresholds.resize(static_cast<Eigen::Index>(rows.size()),
                        rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw ArgumentError("ragged threshold matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        q.thresholds(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed fdd query: ") + e.what());
  }
  q.validate();
  return q;
}

nlohmann::ordered_json to_json(const FddQuery& q) {
  nlohmann::ordered_json j;
  j["times"] = q.times;
  j["sites"] = q.sites;
  std::vector<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < q.thresholds.rows(); ++r) {
    rows.emplace_back();
    for (Eigen::Index c = 0; c < q.thresholds.cols(); ++c) rows.back().push_back(q.thresholds(r, c));
  }
  j["thresholds"] = rows;
  return j;
}

namespace {

void check_sites(std::span<const std::size_t> sites, std::span<const double> thresholds,
                 const SpectralSampler& sampler) {
  if (sites.empty() || sites.size() != thresholds.size())
    throw ArgumentError("need matching, nonempty site and threshold lists");
  for (auto s : sites)
    if (s >= sampler.size()) throw ArgumentError("site index out of range for the spectral sampler");
  for (double z : thresholds)
    if (!(z > 0.0) || !std::isfinite(z)) throw ArgumentError("thresholds must be positive and finite");
}

void check_finite(const Eigen::VectorXd& v) {
  if (!v.allFinite()) throw NumericalError("non-finite spectral draw");
}

}  // namespace

Estimate exponent_nu(std::span<const std::size_t> sites, std::span<const double> thresholds,
                     const SpectralSampler& sampler, std::size_t draws, std::uint64_t seed,
                     std::uint32_t channel) {
  check_sites(sites, thresholds, sampler);
  if (draws < 1) throw ArgumentError("exponent_nu needs at least one draw");
  const double alpha = sampler.alpha();
  const auto m = detail::chunked_moments(draws, 1, seed, channel, [&](Rng& rng, std::span<double> out) {
    const Eigen::VectorXd v = sampler.draw(rng);
    check_finite(v);
    double best = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      best = std::max(best, v(static_cast<Eigen::Index>(sites[i])) / thresholds[i]);
    out[0] = std::pow(best, alpha);
  });
  return {m.mean(0), m.standard_error(0)};
}

Estimate exponent_nu_radial(std::span<const std::size_t> sites, std::span<const double> thresholds,
                            const SpectralSampler& sampler, std::size_t strata,
                            std::size_t per_stratum, std::uint64_t seed, double w_min, double w_max,
                            std::uint32_t channel) {
  check_sites(sites, thresholds, sampler);
  if (strata < 1 || per_stratum < 2) throw ArgumentError("need >= 1 stratum and >= 2 draws per stratum");
  if (!(w_min > 0.0 && w_max > w_min)) throw ArgumentError("need 0 < w_min < w_max");
  const double alpha = sampler.alpha();
  const double log_lo = std::log(w_min);
  const double width = (std::log(w_max) - log_lo) / static_cast<double>(strata);

  // Substituting w = e^s turns alpha w^{-alpha-1} dw into alpha e^{-alpha s} ds.
  std::vector<double> means(strata), variances(strata);
  parallel_for(strata, [&](std::size_t s) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(s));
    std::uniform_real_distribution<double> offset(0.0, width);
    Eigen::VectorXd v(static_cast<Eigen::Index>(sampler.size()));
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t d = 0; d < per_stratum; ++d) {
      const double log_w = log_lo + width * static_cast<double>(s) + offset(rng);
      const double w = std::exp(log_w);
      sampler.draw(rng, v);
      check_finite(v);
      bool hit = false;
      for (std::size_t i = 0; i < sites.size() && !hit; ++i)
        hit = w * v(static_cast<Eigen::Index>(sites[i])) >= thresholds[i];
      const double value = hit ? alpha * std::exp(-alpha * log_w) : 0.0;
      sum += value;
      sum_sq += value * value;
    }
    const auto n = static_cast<double>(per_stratum);
    means[s] = sum / n;
    variances[s] = std::max(0.0, (sum_sq - n * means[s] * means[s]) / (n - 1.0));
  });
  double total = 0.0, var = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    total += width * means[s];
    var += width * width * variances[s] / static_cast<double>(per_stratum);
  }
  return {total, std::sqrt(var)};
}

Eigen::MatrixXd nested_thresholds(const FddQuery& q) {
  Eigen::MatrixXd z = q.thresholds;
  for (Eigen::Index j = z.rows() - 2; j >= 0; --j) z.row(j) = z.row(j).cwiseMin(z.row(j + 1));
  return z;
}

FddResult fdd_probability(const FddQuery& q, const SpectralSampler& sampler, std::size_t draws,
                          std::uint64_t seed, std::uint32_t channel) {
  q.validate();
  if (draws < 2) throw ArgumentError("fdd_probability needs at least 2 draws");
  for (auto s : q.sites)
    if (s >= sampler.size()) throw ArgumentError("site index out of range for the spectral sampler");

  FddResult result;
  result.levels = nested_thresholds(q);
  const auto k = static_cast<std::size_t>(q.times.size());
  std::vector<double> increments(k);
  for (std::size_t j = 0; j < k; ++j) increments[j] = q.times[j] - (j == 0 ? 0.0 : q.times[j - 1]);
  const double alpha = sampler.alpha();

  // Slots 0..k-1 hold the per-factor integrands, slot k the weighted sum.
  const auto m = detail::chunked_moments(draws, k + 1, seed, channel, [&](Rng& rng, std::span<double> out) {
    const Eigen::VectorXd v = sampler.draw(rng);
    check_finite(v);
    double weighted = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double best = 0.0;
      for (std::size_t i = 0; i < q.sites.size(); ++i)
        best = std::max(best, v(static_cast<Eigen::Index>(q.sites[i])) /
                                  result.levels(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      out[j] = std::pow(best, alpha);
      weighted += increments[j] * out[j];
    }
    out[k] = weighted;
  });

  for (std::size_t j = 0; j < k; ++j) result.factors.push_back({m.mean(j), m.standard_error(j)});
  result.probability = std::exp(-m.mean(k));
  result.standard_error = result.probability * m.standard_error(k);
  return result;
}

Estimate fdd_empirical(std::span<const CadlagMaxProcess> realizations, const FddQuery& q) {
  q.validate();
  if (realizations.empty()) throw ArgumentError("fdd_empirical needs at least one realization");
  std::size_t below = 0;
  std::vector<Eigen::Index> rows(q.times.size());
  for (const auto& process : realizations) {
    for (auto s : q.sites)
      if (s >= process.sites()) throw ArgumentError("query site out of range for a realization");
    for (std::size_t j = 0; j < q.times.size(); ++j) {
      const auto it = std::lower_bound(process.times.begin(), process.times.end(), q.times[j]);
      if (process.times.empty() || q.times[j] > process.times.back())
        throw ArgumentError("query time " + std::to_string(q.times[j]) + " beyond the realization horizon");
      if (it == process.times.end() || *it != q.times[j])
        throw ArgumentError("query time " + std::to_string(q.times[j]) + " not on the realization time grid");
      rows[j] = static_cast<Eigen::Index>(std::distance(process.times.begin(), it));
    }
    bool ok = true;
    for (std::size_t j = 0; j < q.times.size() && ok; ++j)
      for (std::size_t i = 0; i < q.sites.size() && ok; ++i)
        ok = process.values(rows[j], static_cast<Eigen::Index>(q.sites[i])) <=
             q.thresholds(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    if (ok) ++below;
  }
  const auto n = static_cast<double>(realizations.size());
  const double p = static_cast<double>(below) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

nlohmann::ordered_json to_json(const FddResult& r) {
  nlohmann::ordered_json j;
  j["probability"] = r.probability;
  j["standard_error"] = r.standard_error;
  auto factors = nlohmann::ordered_json::array();
  for (Eigen::Index f = 0; f < static_cast<Eigen::Index>(r.factors.size()); ++f) {
    nlohmann::ordered_json item;
    item["nu"] = r.factors[static_cast<std::size_t>(f)].value;
    item["nu_se"] = r.factors[static_cast<std::size_t>(f)].standard_error;
    std::vector<double> z(r.levels.cols());
    for (Eigen::Index c = 0; c < r.levels.cols(); ++c) z[static_cast<std::size_t>(c)] = r.levels(f, c);
    item["levels"] = z;
    factors.push_back(item);
  }
  j["factors"] = factors;
  return j;
}

}  // namespace superx
