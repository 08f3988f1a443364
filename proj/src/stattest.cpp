#include "superx/stattest.hpp"

#include "superx/errors.hpp"
#include "superx/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

namespace superx {

namespace {

// Channel bases keep the sample sets of different checks disjoint when they
// share a seed.
constexpr std::uint32_t kMaxStableChannel = 0x100;
constexpr std::uint32_t kSelfSimilarChannel = 0x200;
constexpr std::uint32_t kMarkovChannel = 0x300;
constexpr std::uint32_t kOrderLawChannel = 0x400;
constexpr std::uint32_t kOrderLimitChannel = 0x500;

// Values at `site` of the K atoms of a point measure on [0, u], drawn in the
// same order as sample_ppp. Every atom lies inside the horizon, so arrival
// marks only advance the stream.
template <typename Visit>
void stream_site_values(const SpectralSampler& sampler, double u, std::size_t site, std::size_t truncation,
                        Rng& rng, Visit&& visit) {
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> uniform_time(0.0, u);
  Eigen::VectorXd v(static_cast<Eigen::Index>(sampler.size()));
  const double inv_alpha = -1.0 / sampler.alpha();
  double arrival = 0.0;
  for (std::size_t k = 0; k < truncation; ++k) {
    arrival += unit_exp(rng);
    const double radius = std::pow(arrival / u, inv_alpha);
    uniform_time(rng);
    sampler.draw(rng, v);
    visit(radius * v(static_cast<Eigen::Index>(site)));
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

TestReport make_report(double statistic, double threshold, std::size_t n_samples,
                       std::string description, bool informational) {
  return TestReport{statistic, threshold, n_samples, statistic <= threshold, std::move(description),
                    informational};
}

nlohmann::ordered_json to_json(const TestReport& report) {
  nlohmann::ordered_json j;
  j["description"] = report.description;
  j["statistic"] = report.statistic;
  j["threshold"] = report.threshold;
  j["n_samples"] = report.n_samples;
  j["pass"] = report.pass;
  j["informational"] = report.informational;
  return j;
}

void append_report_jsonl(std::ostream& out, const TestReport& report) {
  out << to_json(report).dump() << '\n';
}

double ks_critical_coefficient(double significance) {
  if (!(significance > 0.0 && significance < 1.0)) throw ArgumentError("significance must be in (0, 1)");
  return std::sqrt(-0.5 * std::log(significance / 2.0));
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return best;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ArgumentError("KS test needs a nonempty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    best = std::max({best, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return best;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double significance,
                         std::string description) {
  const double d = ks_statistic(a, b);
  const auto n = static_cast<double>(a.size());
  const auto m = static_cast<double>(b.size());
  const double threshold = ks_critical_coefficient(significance) * std::sqrt((n + m) / (n * m));
  return make_report(d, threshold, a.size() + b.size(), std::move(description));
}

double poisson_order_stat_cdf(double y, double u, std::size_t rank, double alpha) {
  if (rank < 1) throw ArgumentError("rank must be >= 1");
  if (!(y > 0.0)) return u > 0.0 ? 0.0 : 1.0;
  const double mean = u * std::pow(y, -alpha);
  double term = std::exp(-mean);
  double total = term;
  for (std::size_t j = 1; j < rank; ++j) {
    term *= mean / static_cast<double>(j);
    total += term;
  }
  return std::min(total, 1.0);
}

std::vector<double> superextremal_draws(const SpectralSampler& sampler, double u, std::size_t site,
                                        std::size_t truncation, std::size_t count,
                                        std::uint64_t seed, std::uint32_t channel) {
  if (site >= sampler.size()) throw ArgumentError("site out of range for the spectral sampler");
  if (!(u >= 0.0)) throw ArgumentError("time must be >= 0");
  std::vector<double> out(count, 0.0);
  if (u == 0.0) return out;
  if (truncation < 1) throw ArgumentError("atom count K must be >= 1");
  parallel_for(count, [&](std::size_t i) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(i));
    double best = 0.0;
    stream_site_values(sampler, u, site, truncation, rng, [&](double x) { best = std::max(best, x); });
    out[i] = best;
  });
  return out;
}

std::vector<std::vector<double>> limit_order_stat_draws(const SpectralSampler& sampler,
                                                        std::size_t ranks, double u,
                                                        std::size_t site, std::size_t truncation,
                                                        std::size_t count, std::uint64_t seed,
                                                        std::uint32_t channel) {
  if (site >= sampler.size()) throw ArgumentError("site out of range for the spectral sampler");
  if (!(u > 0.0)) throw ArgumentError("time must be > 0");
  std::vector<std::vector<double>> out(count);
  if (truncation < 1) throw ArgumentError("atom count K must be >= 1");
  if (ranks < 1) throw ArgumentError("rank must be >= 1");
  parallel_for(count, [&](std::size_t i) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(i));
    // top holds the largest values seen so far, descending.
    std::vector<double> top(ranks, 0.0);
    stream_site_values(sampler, u, site, truncation, rng, [&](double x) {
      if (x <= top.back()) return;
      top.insert(std::upper_bound(top.begin(), top.end(), x, std::greater<>()), x);
      top.pop_back();
    });
    out[i] = std::move(top);
  });
  return out;
}

TestReport test_max_stability(const SpectralSampler& sampler, std::size_t copies, double u,
                              std::size_t site, const LimitSampling& cfg) {
  if (copies < 1) throw ArgumentError("max-stability test needs m >= 1 copies");
  const std::vector<double> single =
      superextremal_draws(sampler, u, site, cfg.truncation, cfg.samples, cfg.seed, kMaxStableChannel);
  std::vector<double> pooled(cfg.samples, 0.0);
  for (std::size_t c = 0; c < copies; ++c) {
    const auto copy = superextremal_draws(sampler, u, site, cfg.truncation, cfg.samples, cfg.seed,
                                          kMaxStableChannel + 1 + static_cast<std::uint32_t>(c));
    for (std::size_t i = 0; i < cfg.samples; ++i) pooled[i] = std::max(pooled[i], copy[i]);
  }
  const double scale = std::pow(static_cast<double>(copies), -1.0 / sampler.alpha());
  for (double& x : pooled) x *= scale;
  return ks_two_sample(pooled, single, cfg.significance,
                       "max_stability m=" + std::to_string(copies) + " u=" + fmt(u) +
                           " site=" + std::to_string(site));
}

TestReport test_self_similarity(const SpectralSampler& sampler, double scale, double u,
                                std::size_t site, const LimitSampling& cfg) {
  if (!(scale > 0.0)) throw ArgumentError("self-similarity scale must be > 0");
  const auto stretched =
      superextremal_draws(sampler, scale * u, site, cfg.truncation, cfg.samples, cfg.seed, kSelfSimilarChannel);
  auto rescaled =
      superextremal_draws(sampler, u, site, cfg.truncation, cfg.samples, cfg.seed, kSelfSimilarChannel + 1);
  const double factor = std::pow(scale, 1.0 / sampler.alpha());
  for (double& x : rescaled) x *= factor;
  return ks_two_sample(stretched, rescaled, cfg.significance,
                       "self_similarity c=" + fmt(scale) + " u=" + fmt(u) + " site=" + std::to_string(site));
}

TestReport test_markov(const SpectralSampler& sampler, double u, double h, std::size_t site,
                       const LimitSampling& cfg) {
  if (!(u > 0.0) || !(h >= 0.0)) throw ArgumentError("Markov test needs u > 0 and h >= 0");
  const auto later =
      superextremal_draws(sampler, u + h, site, cfg.truncation, cfg.samples, cfg.seed, kMarkovChannel);
  auto joined = superextremal_draws(sampler, u, site, cfg.truncation, cfg.samples, cfg.seed, kMarkovChannel + 1);
  const auto increment =
      superextremal_draws(sampler, h, site, cfg.truncation, cfg.samples, cfg.seed, kMarkovChannel + 2);
  for (std::size_t i = 0; i < cfg.samples; ++i) joined[i] = std::max(joined[i], increment[i]);
  return ks_two_sample(later, joined, cfg.significance,
                       "markov u=" + fmt(u) + " h=" + fmt(h) + " site=" + std::to_string(site));
}

TestReport test_order_stat_law(const SpectralSampler& sampler, std::size_t rank, double u,
                               std::size_t site, double max_distance, const LimitSampling& cfg) {
  if (rank < 1) throw ArgumentError("rank must be >= 1");
  const auto draws = limit_order_stat_draws(sampler, rank, u, site, cfg.truncation, cfg.samples, cfg.seed,
                                            kOrderLawChannel + static_cast<std::uint32_t>(rank));
  std::vector<double> values;
  values.reserve(draws.size());
  for (const auto& d : draws) values.push_back(d[rank - 1]);
  const double alpha = sampler.alpha();
  const double d =
      ks_statistic(values, [&](double y) { return poisson_order_stat_cdf(y, u, rank, alpha); });
  return make_report(d, max_distance, values.size(),
                     "order_stat_law rank=" + std::to_string(rank) + " u=" + fmt(u) +
                         " site=" + std::to_string(site));
}

std::vector<double> prelimit_order_stat_draws(const Grid& grid, const Variogram& variogram,
                                              SampleSize n, std::size_t rank, double u,
                                              std::size_t site, std::size_t count,
                                              std::uint64_t seed, std::uint32_t channel) {
  if (rank < 1) throw ArgumentError("rank must be >= 1");
  grid.check_site(site);
  const double n_value = n.value();
  if (!(n_value < 1e15)) throw ArgumentError("sample size too large to simulate");
  const auto block = static_cast<std::size_t>(std::llround(n_value));
  const std::size_t active = active_count(block, u);
  // One-site law of Z_n; the 1x1 factor carries the sampler's ridge.
  const Grid single = grid.restrict_to({site});
  const GaussianSampler gauss(CovarianceFamily(variogram, n).matrix(single));
  const double sd = gauss.factor().lower(0, 0);
  const double b = scaling_bn(n);

  std::vector<double> out(count, 0.0);
  if (rank > active) return out;
  parallel_for(count, [&](std::size_t i) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(i));
    std::normal_distribution<double> normal;
    std::vector<double> top(rank, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < active; ++k) {
      const double z = sd * normal(rng);
      if (z <= top.back()) continue;
      auto pos = std::upper_bound(top.begin(), top.end(), z, std::greater<>());
      top.insert(pos, z);
      top.pop_back();
    }
    out[i] = std::exp(b * (top.back() - b));
  });
  return out;
}

OrderStatsConvergence test_order_stats_limit(const Grid& grid, const Variogram& variogram,
                                             const SpectralSampler& limit_sampler,
                                             std::span<const std::int64_t> n_list,
                                             std::size_t rank, double u, std::size_t site,
                                             const LimitSampling& cfg, double slack) {
  if (n_list.empty()) throw ArgumentError("order statistics test needs a nonempty n list");
  const auto limit = limit_order_stat_draws(limit_sampler, rank, u, site, cfg.truncation, cfg.samples,
                                            cfg.seed, kOrderLimitChannel);
  std::vector<double> limit_values;
  limit_values.reserve(limit.size());
  for (const auto& d : limit) limit_values.push_back(d[rank - 1]);

  OrderStatsConvergence result;
  result.n_list.assign(n_list.begin(), n_list.end());
  double worst_step = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const auto pre = prelimit_order_stat_draws(grid, variogram, SampleSize(n_list[k]), rank, u, site,
                                               cfg.samples, cfg.seed,
                                               kOrderLimitChannel + 1 + static_cast<std::uint32_t>(k));
    TestReport r = ks_two_sample(pre, limit_values, cfg.significance,
                                 "order_stats_distance rank=" + std::to_string(rank) +
                                     " n=" + std::to_string(n_list[k]) + " u=" + fmt(u) +
                                     " site=" + std::to_string(site));
    r.informational = true;
    if (k > 0) worst_step = std::max(worst_step, r.statistic - result.distances.back().statistic);
    result.distances.push_back(std::move(r));
  }
  if (n_list.size() == 1) worst_step = 0.0;
  result.trend = make_report(worst_step, slack, cfg.samples * (n_list.size() + 1),
                             "order_stats_trend rank=" + std::to_string(rank) + " u=" + fmt(u) +
                                 " site=" + std::to_string(site));
  return result;
}

}  // namespace superx
