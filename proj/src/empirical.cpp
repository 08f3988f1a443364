#include "superx/empirical.hpp"

#include "superx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

namespace superx {

double CadlagMaxProcess::at(double u, std::size_t site) const {
  if (site >= sites()) throw ArgumentError("site out of range");
  const auto it = std::upper_bound(times.begin(), times.end(), u);
  if (it == times.begin()) return 0.0;
  const auto row = static_cast<Eigen::Index>(std::distance(times.begin(), it) - 1);
  return values(row, static_cast<Eigen::Index>(site));
}

std::size_t active_count(std::size_t n, double u) {
  if (!(u >= 0.0) || !std::isfinite(u)) throw ArgumentError("time must be finite and >= 0");
  const double nd = static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::floor(nd * u));
  // Settle rounding in n * u against the k / n representation of u.
  while (static_cast<double>(k + 1) / nd <= u) ++k;
  while (k > 0 && static_cast<double>(k) / nd > u) --k;
  return k;
}

namespace {

std::size_t common_length(std::span<const SampleFunction> batch, std::size_t sites) {
  std::size_t length = batch.empty() ? sites : static_cast<std::size_t>(batch.front().size());
  for (const auto& f : batch)
    if (static_cast<std::size_t>(f.size()) != length)
      throw ArgumentError("sample functions in a batch must share one length");
  return length;
}

}  // namespace

SampleFunction pointwise_max(std::span<const SampleFunction> batch, std::size_t sites) {
  const std::size_t length = common_length(batch, sites);
  SampleFunction out = SampleFunction::Zero(static_cast<Eigen::Index>(length));
  for (const auto& f : batch) out = out.cwiseMax(f);
  return out;
}

CadlagMaxProcess partial_maxima(std::span<const SampleFunction> batch, std::size_t n,
                                std::span<const double> u_grid) {
  if (n < 1) throw ArgumentError("block size n must be >= 1");
  if (batch.empty()) throw ArgumentError("partial_maxima needs a nonempty batch");
  const std::size_t length = common_length(batch, 0);
  for (std::size_t k = 1; k < u_grid.size(); ++k)
    if (!(u_grid[k] > u_grid[k - 1])) throw ArgumentError("u grid must be strictly increasing");

  CadlagMaxProcess out;
  out.times.assign(u_grid.begin(), u_grid.end());
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(u_grid.size()),
                                     static_cast<Eigen::Index>(length));
  SampleFunction running = SampleFunction::Zero(static_cast<Eigen::Index>(length));
  std::size_t used = 0;
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    const std::size_t active = active_count(n, u_grid[k]);
    if (active > batch.size())
      throw ArgumentError("batch of " + std::to_string(batch.size()) + " functions is too short for " +
                          std::to_string(active) + " active at u = " + std::to_string(u_grid[k]));
    for (; used < active; ++used) running = running.cwiseMax(batch[used]);
    out.values.row(static_cast<Eigen::Index>(k)) = running.transpose();
  }
  return out;
}

std::vector<double> top_values(std::span<const double> values, std::size_t ranks) {
  std::vector<double> out(ranks, 0.0);
  if (ranks == 0) return out;
  std::vector<double> copy(values.begin(), values.end());
  const std::size_t keep = std::min(ranks, copy.size());
  std::partial_sort(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(keep), copy.end(),
                    std::greater<>());
  std::copy_n(copy.begin(), keep, out.begin());
  return out;
}

double empirical_order_stat(std::span<const SampleFunction> batch, std::size_t n,
                            std::size_t rank, double u, std::size_t site) {
  if (rank < 1) throw ArgumentError("rank must be >= 1");
  if (n < 1) throw ArgumentError("block size n must be >= 1");
  const std::size_t active = active_count(n, u);
  if (rank > active) return 0.0;
  if (active > batch.size()) throw ArgumentError("batch is too short for floor(n u) functions");
  std::vector<double> column;
  column.reserve(active);
  for (std::size_t i = 0; i < active; ++i) {
    if (site >= static_cast<std::size_t>(batch[i].size())) throw ArgumentError("site out of range");
    column.push_back(batch[i](static_cast<Eigen::Index>(site)));
  }
  std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(rank - 1), column.end(),
                   std::greater<>());
  return column[rank - 1];
}

void write_process_csv(std::ostream& out, const CadlagMaxProcess& process, std::int64_t realization,
                       bool header) {
  if (header) out << (realization >= 0 ? "realization,u,site,value\n" : "u,site,value\n");
  char buf[96];
  for (std::size_t k = 0; k < process.times.size(); ++k)
    for (std::size_t t = 0; t < process.sites(); ++t) {
      if (realization >= 0) out << realization << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g\n", process.times[k], t,
                    process.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)));
      out << buf;
    }
}

}  // namespace superx
