#pragma once

// Finite discretization of the index space and variograms on it.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace superx {

/// Regular lattice description used to build a Grid.
struct GridSpec {
  int dimension = 1;         ///< 1 or 2
  double extent = 1.0;       ///< lattice covers [0, extent]^dimension
  int resolution = 11;       ///< points per axis, >= 2
  std::size_t origin_index = 0;
  std::size_t site_cap = 400;
};

/// Finite metric index space. Immutable after construction.
class Grid {
 public:
  /// Sites are rows of `coordinates`. Distances are Euclidean.
  Grid(Eigen::MatrixXd coordinates, std::size_t origin_index);

  std::size_t size() const { return static_cast<std::size_t>(coordinates_.rows()); }
  int dimension() const { return static_cast<int>(coordinates_.cols()); }
  std::size_t origin_index() const { return origin_; }
  const Eigen::MatrixXd& coordinates() const { return coordinates_; }
  const Eigen::MatrixXd& distances() const { return distances_; }
  double distance(std::size_t i, std::size_t j) const { return distances_(i, j); }

  /// Sub-grid over `sites` (kept in the given order). The origin of the
  /// sub-grid is the position of the parent origin if present, else 0.
  Grid restrict_to(const std::vector<std::size_t>& sites) const;

  void check_site(std::size_t site) const;

 private:
  Eigen::MatrixXd coordinates_;
  Eigen::MatrixXd distances_;
  std::size_t origin_;
};

Grid build_grid(const GridSpec& spec);

/// Writes "site,x[,y]" rows.
void write_grid_csv(std::ostream& out, const Grid& grid);

/// Fractional variogram Gamma(t1, t2) = scale * dist(t1, t2)^exponent with
/// scale > 0 and exponent in (0, 2].
class Variogram {
 public:
  Variogram(double scale, double exponent);

  double scale() const { return scale_; }
  double exponent() const { return exponent_; }

  double operator()(double distance) const;
  double operator()(const Grid& grid, std::size_t i, std::size_t j) const {
    return (*this)(grid.distance(i, j));
  }

 private:
  double scale_;
  double exponent_;
};

/// Gamma over all site pairs. Exactly symmetric with a zero diagonal.
Eigen::MatrixXd variogram_matrix(const Grid& grid, const Variogram& variogram);

/// Covariance of the Gaussian increment process anchored at the origin:
/// C(i, j) = (Gamma(i, t0) + Gamma(j, t0) - Gamma(i, j)) / 2.
Eigen::MatrixXd increment_covariance(const Grid& grid, const Variogram& variogram);

}  // namespace superx
