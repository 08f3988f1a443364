#include "doctest.h"

#include "superx/empirical.hpp"
#include "superx/errors.hpp"

#include <sstream>

using namespace superx;

namespace {

std::vector<SampleFunction> batch_of(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<SampleFunction> out;
  for (const auto& r : rows) {
    SampleFunction f(static_cast<Eigen::Index>(r.size()));
    Eigen::Index i = 0;
    for (double x : r) f(i++) = x;
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("active_count is floor(n u) on exact fractions") {
  for (std::size_t n : {1u, 3u, 7u, 10u, 100u, 1000u})
    for (std::size_t k = 0; k <= 2 * n; ++k)
      CHECK(active_count(n, static_cast<double>(k) / static_cast<double>(n)) == k);
  CHECK(active_count(10, 0.35) == 3);
  CHECK(active_count(10, 0.0) == 0);
  CHECK_THROWS_AS(active_count(10, -0.1), ArgumentError);
}

TEST_CASE("pointwise_max") {
  const auto batch = batch_of({{1.0, 5.0}, {3.0, 2.0}, {2.0, 4.0}});
  const SampleFunction m = pointwise_max(batch);
  CHECK(m(0) == 3.0);
  CHECK(m(1) == 5.0);
  CHECK(pointwise_max({}, 2) == SampleFunction::Zero(2));
  auto ragged = batch;
  ragged.push_back(SampleFunction::Ones(3));
  CHECK_THROWS_AS(pointwise_max(ragged), ArgumentError);
}

TEST_CASE("partial_maxima") {
  const auto batch = batch_of({{1.0}, {4.0}, {2.0}, {3.0}});
  const std::vector<double> u{0.0, 0.25, 0.5, 1.0};
  const CadlagMaxProcess p = partial_maxima(batch, 4, u);
  CHECK(p.values(0, 0) == 0.0);
  CHECK(p.values(1, 0) == 1.0);
  CHECK(p.values(2, 0) == 4.0);
  CHECK(p.values(3, 0) == 4.0);
  CHECK(p.at(0.3, 0) == 1.0);
  CHECK(p.at(-1.0, 0) == 0.0);
  CHECK(p.at(2.0, 0) == 4.0);

  const std::vector<double> too_far{0.5, 2.0};
  CHECK_THROWS_AS(partial_maxima(batch, 4, too_far), ArgumentError);
  const std::vector<double> flat{0.5, 0.5};
  CHECK_THROWS_AS(partial_maxima(batch, 4, flat), ArgumentError);
}

TEST_CASE("partial maxima at u = 1 equal the pointwise max of the block") {
  std::vector<SampleFunction> batch;
  for (int i = 0; i < 37; ++i) batch.push_back(SampleFunction::Random(4).cwiseAbs());
  const std::vector<double> u{0.1, 0.5, 1.0};
  const CadlagMaxProcess p = partial_maxima(batch, 37, u);
  CHECK(p.values.row(2) == pointwise_max(batch).transpose());
  // Restricting the batch to the first floor(n u) functions gives the same row.
  const std::span<const SampleFunction> head(batch.data(), active_count(37, 0.5));
  CHECK(p.values.row(1) == pointwise_max(head).transpose());
}

TEST_CASE("empirical_order_stat and ties") {
  const auto batch = batch_of({{1.0}, {4.0}, {4.0}, {3.0}});
  CHECK(empirical_order_stat(batch, 4, 1, 1.0, 0) == 4.0);
  CHECK(empirical_order_stat(batch, 4, 2, 1.0, 0) == 4.0);
  CHECK(empirical_order_stat(batch, 4, 3, 1.0, 0) == 3.0);
  CHECK(empirical_order_stat(batch, 4, 2, 0.25, 0) == 0.0);
  CHECK(empirical_order_stat(batch, 4, 1, 0.5, 0) == 4.0);
  CHECK_THROWS_AS(empirical_order_stat(batch, 4, 0, 1.0, 0), ArgumentError);
  CHECK(top_values(std::vector<double>{2.0, 7.0, 7.0}, 4) == std::vector<double>{7.0, 7.0, 2.0, 0.0});
}

TEST_CASE("write_process_csv") {
  CadlagMaxProcess p;
  p.times = {0.5, 1.0};
  p.values.resize(2, 2);
  p.values << 1.0, 2.0, 1.5, 2.0;
  std::ostringstream plain, tagged;
  write_process_csv(plain, p);
  CHECK(plain.str() == "u,site,value\n0.5,0,1\n0.5,1,2\n1,0,1.5\n1,1,2\n");
  write_process_csv(tagged, p, 3, false);
  CHECK(tagged.str() == "3,0.5,0,1\n3,0.5,1,2\n3,1,0,1.5\n3,1,1,2\n");
}
