#pragma once

// Gaussian and log-normal process machinery: the scaling sequence b_n, the
// correlation family r_n = exp(-Gamma / (4 log n)), Cholesky-based samplers,
// the anchored increment process W and the conditional moments of
// Y_n = b_n (Z_n - b_n) given Y_n(t0) = w.

#include "superx/domain.hpp"
#include "superx/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace superx {

/// Values of a function on the grid sites.
using SampleFunction = Eigen::VectorXd;

/// Sample-size parameter n >= 2. Stored as log n so that asymptotic checks
/// can go far beyond the range of 64-bit integers.
class SampleSize {
 public:
  explicit SampleSize(std::int64_t n);
  static SampleSize from_log(double log_n);

  double log_n() const { return log_n_; }
  /// exp(log n); may be +inf for from_log() values.
  double value() const;

 private:
  SampleSize() = default;
  double log_n_ = 0.0;
};

/// b_n = sqrt(2 log n) - (1/2 log log n + log(2 sqrt(pi))) / sqrt(2 log n).
double scaling_bn(SampleSize n);

/// n / (sqrt(2 pi) b_n exp(b_n^2 / 2)), which tends to 1.
double scaling_ratio(SampleSize n);

/// r_n(t1, t2) = exp(-Gamma(t1, t2) / (4 log n)).
class CovarianceFamily {
 public:
  CovarianceFamily(Variogram variogram, SampleSize n) : variogram_(variogram), n_(n) {}

  const Variogram& variogram() const { return variogram_; }
  SampleSize sample_size() const { return n_; }

  double correlation(double gamma) const;
  Eigen::MatrixXd matrix(const Grid& grid) const;

 private:
  Variogram variogram_;
  SampleSize n_;
};

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double ridge = 0.0;  ///< ridge actually added to the diagonal
};

/// Lower factor L with L L^T = matrix + ridge I. On failure the ridge is
/// multiplied by 10, for at most three attempts in total.
CholeskyFactor cholesky_psd(const Eigen::MatrixXd& matrix, double ridge = 1e-10);

/// Centered Gaussian vectors with a fixed covariance.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& covariance, double ridge = 1e-10);

  std::size_t size() const { return static_cast<std::size_t>(factor_.lower.rows()); }
  const CholeskyFactor& factor() const { return factor_; }

  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  CholeskyFactor factor_;
};

/// `count` i.i.d. draws; draw i uses substream (seed, channel, i).
std::vector<SampleFunction> sample_gp(const Grid& grid, const Eigen::MatrixXd& covariance,
                                      std::size_t count, std::uint64_t seed,
                                      std::uint32_t channel = 0);

/// Centered Gaussian process with W(t0) = 0 exactly and incremental variance
/// Gamma. The origin is left out of the factorization, which keeps the
/// covariance of the remaining sites nonsingular.
class IncrementSampler {
 public:
  IncrementSampler(const Grid& grid, const Variogram& variogram);

  std::size_t size() const { return size_; }
  std::size_t origin_index() const { return origin_; }

  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  std::size_t size_;
  std::size_t origin_;
  std::vector<Eigen::Index> others_;
  Eigen::MatrixXd lower_;
};

SampleFunction sample_W(const Grid& grid, const Variogram& variogram, std::uint64_t seed,
                        std::uint32_t index = 0);

/// X_n(t) = exp(b_n (z(t) - b_n)). Throws NumericalError on overflow.
SampleFunction lognormal_X(const SampleFunction& z, SampleSize n);

/// E[Y_n(t) | Y_n(t0) = w] = w r_n(t, t0) + b_n^2 (r_n(t, t0) - 1).
SampleFunction conditional_mean(double w, SampleSize n, const Grid& grid,
                                const Variogram& variogram);

/// Cov[Y_n(t1), Y_n(t2) | Y_n(t0)] = b_n^2 (r_n(t1, t2) - r_n(t1, t0) r_n(t2, t0)).
Eigen::MatrixXd conditional_cov(SampleSize n, const Grid& grid, const Variogram& variogram);

/// Draws of Y_n^w, composed from conditional_mean and a factor of
/// conditional_cov restricted to the non-origin sites.
class ConditionalSampler {
 public:
  ConditionalSampler(double w, SampleSize n, const Grid& grid, const Variogram& variogram);
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  std::size_t origin_;
  std::vector<Eigen::Index> others_;
  Eigen::MatrixXd lower_;
};

/// Log-normal processes X_n = exp(b_n (Z_n - b_n)) on a grid, with Z_n
/// correlated through CovarianceFamily.
class LogNormalSampler {
 public:
  LogNormalSampler(const Grid& grid, const Variogram& variogram, SampleSize n);

  std::size_t size() const { return gauss_.size(); }
  double bn() const { return bn_; }
  const GaussianSampler& gaussian() const { return gauss_; }

  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  double bn_;
  GaussianSampler gauss_;
};

/// Finite-site exceedance set {f : f(t_i) >= z_i for some i}.
struct ExceedanceSet {
  std::vector<std::size_t> sites;
  std::vector<double> thresholds;
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

enum class TailEstimator { crude, importance };

/// Monte Carlo estimate of n P[X_n in A] from `draws` samples of Z_n on the
/// sites of A. The importance estimator samples from an equal mixture of
/// Gaussians shifted by c_j r_n(., t_j), c_j = b_n + log(z_j) / b_n, and
/// reweights by the exact likelihood ratio; it is unbiased.
Estimate exceedance_rate(const Grid& grid, const Variogram& variogram, SampleSize n,
                         const ExceedanceSet& set, std::size_t draws, std::uint64_t seed,
                         TailEstimator estimator = TailEstimator::importance,
                         std::uint32_t channel = 0);

}  // namespace superx
