#include "superx/domain.hpp"

#include "superx/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace superx {

Grid::Grid(Eigen::MatrixXd coordinates, std::size_t origin_index)
    : coordinates_(std::move(coordinates)), origin_(origin_index) {
  const auto n = coordinates_.rows();
  if (n < 1) throw ArgumentError("grid needs at least one site");
  if (origin_ >= static_cast<std::size_t>(n))
    throw ArgumentError("origin index " + std::to_string(origin_) + " out of range for " +
                        std::to_string(n) + " sites");
  if (!coordinates_.allFinite()) throw ArgumentError("grid coordinates must be finite");
  distances_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    distances_(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = (coordinates_.row(i) - coordinates_.row(j)).norm();
      if (!(d > 0.0)) throw ArgumentError("grid sites must be pairwise distinct");
      distances_(i, j) = d;
      distances_(j, i) = d;
    }
  }
}

Grid Grid::restrict_to(const std::vector<std::size_t>& sites) const {
  if (sites.empty()) throw ArgumentError("restriction needs at least one site");
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(sites.size()), coordinates_.cols());
  std::size_t origin = 0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    check_site(sites[k]);
    coords.row(static_cast<Eigen::Index>(k)) = coordinates_.row(static_cast<Eigen::Index>(sites[k]));
    if (sites[k] == origin_) origin = k;
  }
  return Grid(std::move(coords), origin);
}

void Grid::check_site(std::size_t site) const {
  if (site >= size())
    throw ArgumentError("site index " + std::to_string(site) + " out of range for " +
                        std::to_string(size()) + " sites");
}

Grid build_grid(const GridSpec& spec) {
  if (spec.dimension != 1 && spec.dimension != 2)
    throw ArgumentError("grid dimension must be 1 or 2");
  if (spec.resolution < 2) throw ArgumentError("grid resolution must be >= 2 per axis");
  if (!(spec.extent > 0.0) || !std::isfinite(spec.extent))
    throw ArgumentError("grid extent must be positive and finite");

  const auto per_axis = static_cast<std::size_t>(spec.resolution);
  const std::size_t total = spec.dimension == 1 ? per_axis : per_axis * per_axis;
  if (total > spec.site_cap)
    throw SizingError("grid of " + std::to_string(total) + " sites exceeds the cap of " +
                      std::to_string(spec.site_cap));
  if (spec.origin_index >= total)
    throw ArgumentError("origin index " + std::to_string(spec.origin_index) +
                        " out of range for " + std::to_string(total) + " sites");

  const double step = spec.extent / static_cast<double>(spec.resolution - 1);
  Eigen::MatrixXd coords(static_cast<Eigen::Index>(total), spec.dimension);
  if (spec.dimension == 1) {
    for (std::size_t i = 0; i < per_axis; ++i) coords(static_cast<Eigen::Index>(i), 0) = step * static_cast<double>(i);
  } else {
    // Row-major: site = iy * resolution + ix.
    for (std::size_t iy = 0; iy < per_axis; ++iy)
      for (std::size_t ix = 0; ix < per_axis; ++ix) {
        const auto row = static_cast<Eigen::Index>(iy * per_axis + ix);
        coords(row, 0) = step * static_cast<double>(ix);
        coords(row, 1) = step * static_cast<double>(iy);
      }
  }
  return Grid(std::move(coords), spec.origin_index);
}

void write_grid_csv(std::ostream& out, const Grid& grid) {
  out << (grid.dimension() == 1 ? "site,x\n" : "site,x,y\n");
  char buf[64];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << i;
    for (int d = 0; d < grid.dimension(); ++d) {
      std::snprintf(buf, sizeof buf, ",%.17g", grid.coordinates()(static_cast<Eigen::Index>(i), d));
      out << buf;
    }
    out << '\n';
  }
}

Variogram::Variogram(double scale, double exponent) : scale_(scale), exponent_(exponent) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("variogram scale must be > 0");
  if (!(exponent > 0.0 && exponent <= 2.0))
    throw ArgumentError("variogram exponent must lie in (0, 2]");
}

double Variogram::operator()(double distance) const {
  if (distance == 0.0) return 0.0;
  return scale_ * std::pow(distance, exponent_);
}

Eigen::MatrixXd variogram_matrix(const Grid& grid, const Variogram& variogram) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      const double g = variogram(grid.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      gamma(i, j) = g;
      gamma(j, i) = g;
    }
  return gamma;
}

Eigen::MatrixXd increment_covariance(const Grid& grid, const Variogram& variogram) {
  const Eigen::MatrixXd gamma = variogram_matrix(grid, variogram);
  const auto o = static_cast<Eigen::Index>(grid.origin_index());
  const Eigen::VectorXd to_origin = gamma.col(o);
  const auto n = gamma.rows();
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = 0.5 * (to_origin(i) + to_origin(j) - gamma(i, j));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  return cov;
}

}  // namespace superx
