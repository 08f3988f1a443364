#include "doctest.h"

#include "superx/errors.hpp"
#include "superx/fdd.hpp"

#include <cmath>

using namespace superx;

namespace {

const Grid& two_sites() {
  static const Grid g = build_grid({1, 1.0, 2, 0});
  return g;
}

FddQuery query(std::vector<double> times, std::vector<std::size_t> sites,
               std::initializer_list<double> flat) {
  FddQuery q{std::move(times), std::move(sites), {}};
  q.thresholds.resize(static_cast<Eigen::Index>(q.times.size()), static_cast<Eigen::Index>(q.sites.size()));
  auto it = flat.begin();
  for (Eigen::Index r = 0; r < q.thresholds.rows(); ++r)
    for (Eigen::Index c = 0; c < q.thresholds.cols(); ++c) q.thresholds(r, c) = *it++;
  return q;
}

}  // namespace

TEST_CASE("one-site exponent measure is z^-alpha") {
  const BrownResnickSpectral br(two_sites(), Variogram(1.0, 1.0), 1.0);
  const std::vector<std::size_t> origin{0};
  for (double z : {0.3, 1.0, 2.0, 10.0}) {
    const std::vector<double> th{z};
    const Estimate e = exponent_nu(origin, th, br, 1000, 3);
    CHECK(std::abs(e.value - 1.0 / z) <= 1e-12);
  }
  const BrownResnickSpectral br2(two_sites(), Variogram(1.0, 1.0), 2.0);
  const std::vector<double> th{2.0};
  CHECK(exponent_nu(origin, th, br2, 100, 3).value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("comonotone profile gives 1 / min z") {
  const DegenerateSpectral deg(3);
  const std::vector<std::size_t> sites{0, 1, 2};
  const std::vector<double> th{2.0, 0.5, 4.0};
  CHECK(exponent_nu(sites, th, deg, 100, 1).value == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("two-site Brown-Resnick exponent against quadrature") {
  // E[max(1, exp(W - 1/2))], W ~ N(0, 1), computed by adaptive quadrature.
  const double oracle = 1.38292492254802621;
  const BrownResnickSpectral br(two_sites(), Variogram(1.0, 1.0));
  const std::vector<std::size_t> sites{0, 1};
  const std::vector<double> th{1.0, 1.0};
  const Estimate e = exponent_nu(sites, th, br, 1000000, 5);
  CHECK(std::abs(e.value - oracle) <= 3.0 * e.standard_error);

  const Estimate r = exponent_nu_radial(sites, th, br, 64, 4000, 7);
  // The radial form misses the mass above w_max = 1e3, at most 1e-3.
  CHECK(std::abs(r.value - oracle) <= 4.0 * r.standard_error + 1e-3);
}

TEST_CASE("exponent measure symmetries") {
  const Grid g = build_grid({1, 1.0, 4, 0});
  const BrownResnickSpectral br(g, Variogram(1.0, 1.0));
  const std::vector<std::size_t> a{1, 2, 3}, b{3, 1, 2};
  const std::vector<double> za{0.5, 1.0, 2.0}, zb{2.0, 0.5, 1.0};
  CHECK(exponent_nu(a, za, br, 20000, 9).value == exponent_nu(b, zb, br, 20000, 9).value);

  // Raising a threshold cannot increase nu on common draws.
  const std::vector<double> higher{0.5, 1.5, 2.0};
  CHECK(exponent_nu(a, higher, br, 20000, 9).value <= exponent_nu(a, za, br, 20000, 9).value);
  // Adding a site cannot decrease it.
  const std::vector<std::size_t> fewer{1, 2};
  const std::vector<double> zfewer{0.5, 1.0};
  CHECK(exponent_nu(a, za, br, 20000, 9).value >= exponent_nu(fewer, zfewer, br, 20000, 9).value);

  const std::vector<double> bad{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(exponent_nu(a, bad, br, 10, 1), ArgumentError);
  const std::vector<std::size_t> oob{7};
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(exponent_nu(oob, one, br, 10, 1), ArgumentError);
}

TEST_CASE("nested thresholds") {
  const FddQuery q = query({0.2, 0.5, 1.0}, {0, 1}, {3.0, 1.0, 2.0, 4.0, 5.0, 0.5});
  const Eigen::MatrixXd z = nested_thresholds(q);
  CHECK(z(0, 0) == 2.0);
  CHECK(z(0, 1) == 0.5);
  CHECK(z(1, 0) == 2.0);
  CHECK(z(1, 1) == 0.5);
  CHECK(z(2, 0) == 5.0);
  CHECK(z(2, 1) == 0.5);
}

TEST_CASE("fdd_probability reference cases") {
  const BrownResnickSpectral br(two_sites(), Variogram(1.0, 1.0));
  SUBCASE("two times at the origin with unit thresholds") {
    const FddResult r = fdd_probability(query({0.5, 1.0}, {0}, {1.0, 1.0}), br, 1000, 1);
    CHECK(r.probability == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(r.standard_error <= 1e-12);
  }
  SUBCASE("single time is the Frechet law") {
    const FddResult r = fdd_probability(query({2.0}, {0}, {4.0}), br, 1000, 1);
    CHECK(r.probability == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  }
  SUBCASE("raising thresholds raises the probability") {
    const auto lo = fdd_probability(query({0.5, 1.0}, {0, 1}, {1.0, 1.0, 1.0, 1.0}), br, 20000, 3);
    const auto hi = fdd_probability(query({0.5, 1.0}, {0, 1}, {1.0, 2.0, 1.0, 2.0}), br, 20000, 3);
    CHECK(hi.probability > lo.probability);
    CHECK(lo.probability > 0.0);
    CHECK(hi.probability < 1.0);
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(query({0.5, 0.5}, {0}, {1.0, 1.0}).validate(), ArgumentError);
  CHECK_THROWS_AS(query({0.0}, {0}, {1.0}).validate(), ArgumentError);
  CHECK_THROWS_AS(query({1.0}, {0}, {-1.0}).validate(), ArgumentError);
  CHECK_THROWS_AS(query({1.0}, {5}, {1.0}).validate(two_sites()), ArgumentError);
  CHECK_THROWS_AS(fdd_query_from_json(nlohmann::json::parse(R"({"times": [1]})")), ConfigError);
  const auto q = fdd_query_from_json(
      nlohmann::json::parse(R"({"times": [0.5, 1], "sites": [0, 1], "thresholds": [[1, 2], [3, 4]]})"));
  CHECK(q.thresholds(1, 0) == 3.0);
  CHECK(to_json(q).dump() == R"({"times":[0.5,1.0],"sites":[0,1],"thresholds":[[1.0,2.0],[3.0,4.0]]})");
}

TEST_CASE("fdd_empirical") {
  const DegenerateSpectral deg(2);
  const std::vector<double> grid{0.5, 1.0};
  std::vector<CadlagMaxProcess> reals;
  for (std::uint32_t i = 0; i < 10000; ++i)
    reals.push_back(theta_tilde_map(sample_ppp(deg, 1.0, 300, 13, 0, i), grid));

  const Estimate all = fdd_empirical(reals, query({0.5, 1.0}, {0}, {1e12, 1e12}));
  CHECK(all.value == 1.0);
  const Estimate none = fdd_empirical(reals, query({1.0}, {1}, {1e-9}));
  CHECK(none.value == 0.0);

  const Estimate e = fdd_empirical(reals, query({0.5, 1.0}, {0, 1}, {1.0, 1.0, 1.0, 1.0}));
  CHECK(std::abs(e.value - std::exp(-1.0)) <= 4.0 * e.standard_error);

  CHECK_THROWS_AS(fdd_empirical(reals, query({0.7}, {0}, {1.0})), ArgumentError);
  CHECK_THROWS_AS(fdd_empirical(reals, query({2.0}, {0}, {1.0})), ArgumentError);
}

TEST_CASE("theoretical and empirical fdd agree for Brown-Resnick") {
  const Grid g = build_grid({1, 1.0, 3, 0});
  const BrownResnickSpectral br(g, Variogram(1.0, 1.0));
  const std::vector<double> grid{0.5, 1.0};
  const FddQuery q = query({0.5, 1.0}, {0, 2}, {1.0, 0.8, 2.0, 1.5});
  std::vector<CadlagMaxProcess> reals;
  for (std::uint32_t i = 0; i < 5000; ++i)
    reals.push_back(theta_tilde_map(sample_ppp(br, 1.0, 500, 17, 0, i), grid));
  const Estimate emp = fdd_empirical(reals, q);
  const FddResult th = fdd_probability(q, br, 200000, 19);
  CHECK(std::abs(emp.value - th.probability) <= 4.0 * std::hypot(emp.standard_error, th.standard_error));
}
