#include "doctest.h"

#include "superx/errors.hpp"
#include "superx/stattest.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace superx;
using doctest::Approx;

TEST_CASE("KS critical coefficient") {
  CHECK(ks_critical_coefficient(0.01) == Approx(1.6276).epsilon(1e-4));
  CHECK(ks_critical_coefficient(0.05) == Approx(1.3581).epsilon(1e-4));
  CHECK_THROWS_AS(ks_critical_coefficient(0.0), ArgumentError);
}

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{3.0, 1.0, 2.0};
  CHECK(ks_statistic(a, b) == 0.0);
  const std::vector<double> lo{1.0, 2.0}, hi{3.0, 4.0};
  CHECK(ks_statistic(lo, hi) == 1.0);
  const std::vector<double> t1{1.0, 1.0, 2.0}, t2{1.0, 2.0, 2.0};
  CHECK(ks_statistic(t1, t2) == Approx(1.0 / 3.0));
  const std::vector<double> u{0.1, 0.4, 0.7}, v{0.2, 0.5, 0.8, 0.9};
  // Step functions cross at 0.1..0.7; largest gap 3/3 - 2/4 after 0.7.
  CHECK(ks_statistic(u, v) == Approx(0.5));

  // Two points each cannot reject at 1%: threshold 1.628 > 1.
  CHECK(ks_two_sample(lo, hi).pass);
  std::vector<double> left(100), right(100);
  for (int i = 0; i < 100; ++i) {
    left[static_cast<std::size_t>(i)] = i;
    right[static_cast<std::size_t>(i)] = 100 + i;
  }
  const TestReport r = ks_two_sample(left, right);
  CHECK(r.threshold == Approx(ks_critical_coefficient(0.01) * std::sqrt(200.0 / 10000.0)));
  CHECK_FALSE(r.pass);
  CHECK(r.n_samples == 200);
}

TEST_CASE("one-sample KS statistic") {
  const std::vector<double> s{0.5};
  CHECK(ks_statistic(s, [](double y) { return std::clamp(y, 0.0, 1.0); }) == Approx(0.5));
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  CHECK(ks_statistic(grid, [](double y) { return std::clamp(y, 0.0, 1.0); }) == Approx(0.1));
}

TEST_CASE("Poisson order-statistic law") {
  CHECK(poisson_order_stat_cdf(2.0, 1.0, 1) == Approx(std::exp(-0.5)));
  CHECK(poisson_order_stat_cdf(2.0, 1.0, 2) == Approx(1.5 * std::exp(-0.5)));
  CHECK(poisson_order_stat_cdf(2.0, 3.0, 3, 2.0) ==
        Approx(std::exp(-0.75) * (1.0 + 0.75 + 0.75 * 0.75 / 2.0)));
  CHECK(poisson_order_stat_cdf(0.0, 1.0, 1) == 0.0);
  CHECK(poisson_order_stat_cdf(1e-300, 1.0, 4) == 0.0);
  // Increasing in y and in rank.
  for (double y : {0.2, 0.5, 1.0, 3.0}) {
    CHECK(poisson_order_stat_cdf(y, 1.0, 2) >= poisson_order_stat_cdf(y, 1.0, 1));
    CHECK(poisson_order_stat_cdf(y * 1.1, 1.0, 2) > poisson_order_stat_cdf(y, 1.0, 2));
  }
}

TEST_CASE("report serialization") {
  const TestReport r = make_report(0.01, 0.02, 100, "demo", true);
  CHECK(r.pass);
  std::ostringstream out;
  append_report_jsonl(out, r);
  CHECK(out.str() ==
        "{\"description\":\"demo\",\"statistic\":0.01,\"threshold\":0.02,\"n_samples\":100,"
        "\"pass\":true,\"informational\":true}\n");
}

TEST_CASE("superextremal draws") {
  const DegenerateSpectral deg(2);
  CHECK(superextremal_draws(deg, 0.0, 0, 10, 5, 1, 0) == std::vector<double>(5, 0.0));
  const auto x = superextremal_draws(deg, 2.0, 1, 500, 4000, 3, 0);
  // M(2) is Frechet with scale 2.
  const double d = ks_statistic(x, [](double y) { return y > 0.0 ? std::exp(-2.0 / y) : 0.0; });
  CHECK(d <= ks_critical_coefficient(0.01) / std::sqrt(4000.0));
  CHECK_THROWS_AS(superextremal_draws(deg, 1.0, 2, 10, 5, 1, 0), ArgumentError);
}

TEST_CASE("limit property tests pass for both profile families") {
  const Grid g = build_grid({1, 1.0, 5, 0});
  const DegenerateSpectral deg(g.size());
  const BrownResnickSpectral br(g, Variogram(1.0, 1.0));
  LimitSampling cfg;
  cfg.samples = 3000;
  cfg.truncation = 400;
  cfg.seed = 2024;
  for (const SpectralSampler* s : {static_cast<const SpectralSampler*>(&deg),
                                   static_cast<const SpectralSampler*>(&br)}) {
    CHECK(test_max_stability(*s, 2, 1.0, 3, cfg).pass);
    CHECK(test_self_similarity(*s, 2.0, 1.0, 3, cfg).pass);
    CHECK(test_markov(*s, 0.5, 0.5, 3, cfg).pass);
  }
}

TEST_CASE("a wrong scaling is detected") {
  // alpha = 1 draws checked as if alpha were 0.5: the rescaled sample is off.
  const DegenerateSpectral a1(1, 1.0);
  LimitSampling cfg;
  cfg.samples = 3000;
  cfg.truncation = 400;
  cfg.seed = 5;
  auto stretched = superextremal_draws(a1, 3.0, 0, cfg.truncation, cfg.samples, 5, 90);
  auto base = superextremal_draws(a1, 1.0, 0, cfg.truncation, cfg.samples, 5, 91);
  for (double& x : base) x *= 9.0;
  CHECK_FALSE(ks_two_sample(stretched, base).pass);
}

TEST_CASE("limit order statistics follow the Poisson law") {
  const DegenerateSpectral deg(1);
  LimitSampling cfg;
  cfg.samples = 5000;
  cfg.truncation = 500;
  cfg.seed = 8;
  for (std::size_t rank : {1u, 2u, 3u}) {
    const TestReport r = test_order_stat_law(deg, rank, 1.0, 0, 0.03, cfg);
    CAPTURE(rank);
    CHECK(r.pass);
  }
}

TEST_CASE("pre-limit maxima match the exact Gaussian law") {
  const Grid g = build_grid({1, 1.0, 3, 0});
  const SampleSize n(100);
  const double b = scaling_bn(n);
  const auto x = prelimit_order_stat_draws(g, Variogram(1.0, 1.0), n, 1, 1.0, 1, 5000, 4, 0);
  // P[max of 100 X <= y] = Phi(b + log(y) / b)^100
  const double d = ks_statistic(x, [&](double y) {
    if (!(y > 0.0)) return 0.0;
    const double phi = 0.5 * std::erfc(-(b + std::log(y) / b) / std::numbers::sqrt2);
    return std::pow(phi, 100.0);
  });
  CHECK(d <= ks_critical_coefficient(0.01) / std::sqrt(5000.0));
  // Fewer than rank active values give zeros.
  CHECK(prelimit_order_stat_draws(g, Variogram(1.0, 1.0), n, 2, 0.01, 0, 3, 4, 0) ==
        std::vector<double>(3, 0.0));
}

TEST_CASE("order statistics approach the limit") {
  const Grid g = build_grid({1, 1.0, 3, 0});
  const BrownResnickSpectral br(g, Variogram(1.0, 1.0));
  LimitSampling cfg;
  cfg.samples = 4000;
  cfg.truncation = 500;
  cfg.seed = 12;
  const std::vector<std::int64_t> n_list{10, 1000};
  const auto res = test_order_stats_limit(g, Variogram(1.0, 1.0), br, n_list, 1, 1.0, 0, cfg, 0.01);
  REQUIRE(res.distances.size() == 2);
  CHECK(res.distances[0].informational);
  CHECK(res.distances[1].statistic < res.distances[0].statistic);
  CHECK(res.trend.pass);
}

TEST_CASE("streamed limit draws match full point measures") {
  const Grid g = build_grid({1, 1.0, 4, 0});
  const BrownResnickSpectral br(g, Variogram(1.0, 1.0));
  const auto sups = superextremal_draws(br, 1.5, 2, 300, 20, 61, 5);
  const auto ranks = limit_order_stat_draws(br, 3, 1.5, 2, 300, 20, 61, 5);
  for (std::uint32_t i = 0; i < 20; ++i) {
    const PointMeasure pm = sample_ppp(br, 1.5, 300, 61, 5, i);
    CHECK(sups[i] == Approx(theta_map(pm)(2)).epsilon(1e-14));
    const auto expect = order_stats(pm, 3, 1.5, 2);
    for (std::size_t r = 0; r < 3; ++r) CHECK(ranks[i][r] == Approx(expect[r]).epsilon(1e-14));
  }
}
