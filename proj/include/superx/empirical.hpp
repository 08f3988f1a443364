#pragma once

// Pre-limit maxima: pointwise maxima M_n, partial maxima processes and
// empirical order statistics built from batches of sampled functions.

#include "superx/gauss.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace superx {

/// Running spatial maxima recorded at increasing query times. Row k of
/// `values` holds the process at times[k]; values are nondecreasing down
/// each column.
struct CadlagMaxProcess {
  std::vector<double> times;
  Eigen::MatrixXd values;  ///< times x sites

  std::size_t sites() const { return static_cast<std::size_t>(values.cols()); }
  /// Value at the last recorded time <= u, or 0 before the first one.
  double at(double u, std::size_t site) const;
};

/// Number of functions active at time u in a block of size n: floor(n u).
/// Computed so that u = k / n (as a double) maps to exactly k.
std::size_t active_count(std::size_t n, double u);

/// Per-site maximum. An empty batch gives the zero function of length `sites`.
SampleFunction pointwise_max(std::span<const SampleFunction> batch, std::size_t sites = 0);

/// Value at (u, t) is the maximum over the first floor(n u) functions.
CadlagMaxProcess partial_maxima(std::span<const SampleFunction> batch, std::size_t n,
                                std::span<const double> u_grid);

/// rank-th largest of the first floor(n u) values at `site`; 0 when fewer
/// than `rank` are available. Ties keep multiplicity.
double empirical_order_stat(std::span<const SampleFunction> batch, std::size_t n,
                            std::size_t rank, double u, std::size_t site);

/// Top `ranks` values (descending, zero padded) of a plain sample.
std::vector<double> top_values(std::span<const double> values, std::size_t ranks);

/// Writes "u,site,value" rows. With a nonnegative `realization`, a leading
/// realization column is added.
void write_process_csv(std::ostream& out, const CadlagMaxProcess& process,
                       std::int64_t realization = -1, bool header = true);

}  // namespace superx
