#pragma once

// Kolmogorov-Smirnov machinery and the distributional property checks of the
// superextremal limit: max-stability, self-similarity, the max-increment
// Markov identity and convergence of order statistics.

#include "superx/domain.hpp"
#include "superx/gauss.hpp"
#include "superx/ppp.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace superx {

struct TestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t n_samples = 0;
  bool pass = false;  ///< statistic <= threshold
  std::string description;
  /// Informational rows are reported but do not decide a run's exit status.
  bool informational = false;
};

TestReport make_report(double statistic, double threshold, std::size_t n_samples,
                       std::string description, bool informational = false);

nlohmann::ordered_json to_json(const TestReport& report);
void append_report_jsonl(std::ostream& out, const TestReport& report);

/// c(a) = sqrt(-log(a / 2) / 2); c(0.01) = 1.628.
double ks_critical_coefficient(double significance);

/// sup |F_a - F_b| over the pooled sample.
double ks_statistic(std::span<const double> a, std::span<const double> b);
/// sup |F_n - F| for a continuous reference CDF.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample test with threshold c(significance) sqrt((n + m) / (n m)).
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b,
                         double significance = 0.01, std::string description = "ks_two_sample");

/// P[r-th largest atom value at a site with V == 1 is <= y] after time u:
/// sum_{j < r} exp(-u y^-alpha) (u y^-alpha)^j / j!.
double poisson_order_stat_cdf(double y, double u, std::size_t rank, double alpha = 1.0);

/// Settings shared by the limit-side property tests.
struct LimitSampling {
  std::size_t samples = 10000;      ///< N, draws per compared sample
  std::size_t truncation = 1000;    ///< K, atoms per point measure
  double significance = 0.01;
  std::uint64_t seed = 0;
};

/// N draws of M(u, site), each from an independent K-atom point measure on
/// [0, u]. u = 0 gives zeros.
std::vector<double> superextremal_draws(const SpectralSampler& sampler, double u, std::size_t site,
                                        std::size_t truncation, std::size_t count,
                                        std::uint64_t seed, std::uint32_t channel);

/// N draws of the first `ranks` order statistics at (u, site).
std::vector<std::vector<double>> limit_order_stat_draws(const SpectralSampler& sampler,
                                                        std::size_t ranks, double u,
                                                        std::size_t site, std::size_t truncation,
                                                        std::size_t count, std::uint64_t seed,
                                                        std::uint32_t channel);

/// KS between m^{-1/alpha} max of m independent M(u, site) and M(u, site).
TestReport test_max_stability(const SpectralSampler& sampler, std::size_t copies, double u,
                              std::size_t site, const LimitSampling& cfg);

/// KS between M(c u, site) and c^{1/alpha} M(u, site).
TestReport test_self_similarity(const SpectralSampler& sampler, double scale, double u,
                                std::size_t site, const LimitSampling& cfg);

/// KS between M(u + h, site) and max(M(u, site), M'(h, site)), M' independent.
TestReport test_markov(const SpectralSampler& sampler, double u, double h, std::size_t site,
                       const LimitSampling& cfg);

/// One-sample KS of the limit rank-th order statistic at (u, site) against
/// poisson_order_stat_cdf, with a fixed distance threshold. Valid where V == 1
/// at `site` (the origin, or anywhere for the degenerate sampler).
TestReport test_order_stat_law(const SpectralSampler& sampler, std::size_t rank, double u,
                               std::size_t site, double max_distance, const LimitSampling& cfg);

struct OrderStatsConvergence {
  std::vector<std::int64_t> n_list;
  std::vector<TestReport> distances;  ///< one informational KS report per n
  TestReport trend;                   ///< largest step increase vs slack
};

/// Pre-limit: rank-th largest of floor(n u) log-normal values at `site`.
/// Draw i uses substream (seed, channel, i).
std::vector<double> prelimit_order_stat_draws(const Grid& grid, const Variogram& variogram,
                                              SampleSize n, std::size_t rank, double u,
                                              std::size_t site, std::size_t count,
                                              std::uint64_t seed, std::uint32_t channel);

/// KS distances between pre-limit and limit rank-th order statistics at
/// (u, site) for each n, and whether the sequence is nonincreasing up to
/// `slack` per step.
OrderStatsConvergence test_order_stats_limit(const Grid& grid, const Variogram& variogram,
                                             const SpectralSampler& limit_sampler,
                                             std::span<const std::int64_t> n_list,
                                             std::size_t rank, double u, std::size_t site,
                                             const LimitSampling& cfg, double slack = 0.01);

}  // namespace superx
