#include "superx/gauss.hpp"

#include "superx/detail/moments.hpp"
#include "superx/errors.hpp"
#include "superx/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace superx {

SampleSize::SampleSize(std::int64_t n) {
  if (n < 2) throw ArgumentError("sample size n must be >= 2, got " + std::to_string(n));
  log_n_ = std::log(static_cast<double>(n));
}

SampleSize SampleSize::from_log(double log_n) {
  if (!(log_n >= std::log(2.0)) || !std::isfinite(log_n))
    throw ArgumentError("log n must be finite and >= log 2");
  SampleSize s;
  s.log_n_ = log_n;
  return s;
}

double SampleSize::value() const { return std::exp(log_n_); }

namespace {

double bn_correction(SampleSize n) {
  return 0.5 * std::log(n.log_n()) + std::log(2.0 * std::sqrt(std::numbers::pi));
}

}  // namespace

double scaling_bn(SampleSize n) {
  const double root = std::sqrt(2.0 * n.log_n());
  return root - bn_correction(n) / root;
}

double scaling_ratio(SampleSize n) {
  const double b = scaling_bn(n);
  const double c = bn_correction(n);
  // log n - b^2 / 2 = c - c^2 / (4 log n) exactly; avoids cancellation at large n.
  return std::exp(c - c * c / (4.0 * n.log_n()) - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(b));
}

double CovarianceFamily::correlation(double gamma) const {
  return std::exp(-gamma / (4.0 * n_.log_n()));
}

Eigen::MatrixXd CovarianceFamily::matrix(const Grid& grid) const {
  return variogram_matrix(grid, variogram_).unaryExpr([this](double g) { return correlation(g); });
}

CholeskyFactor cholesky_psd(const Eigen::MatrixXd& matrix, double ridge) {
  if (matrix.rows() != matrix.cols()) throw ArgumentError("cholesky_psd needs a square matrix");
  if (!(ridge >= 0.0)) throw ArgumentError("ridge must be nonnegative");
  if (!matrix.allFinite()) throw NumericalError("matrix has non-finite entries");
  const double tolerance = 1e-12 * std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > tolerance)
    throw ArgumentError("cholesky_psd needs a symmetric matrix");

  const auto n = matrix.rows();
  double current = ridge;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += current;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd lower = llt.matrixL();
      if (lower.allFinite()) return {std::move(lower), current};
    }
    current = current > 0.0 ? current * 10.0 : 1e-10;
  }
  throw NumericalError("Cholesky factorization of a " + std::to_string(n) + "x" +
                       std::to_string(n) + " matrix failed after ridge escalation");
}

namespace {

void standard_normals(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = normal(rng);
}

std::vector<Eigen::Index> sites_except(std::size_t size, std::size_t skip) {
  std::vector<Eigen::Index> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i)
    if (i != skip) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

}  // namespace

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance, double ridge)
    : factor_(cholesky_psd(covariance, ridge)) {}

void GaussianSampler::draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<std::size_t>(out.size()) != size())
    throw ArgumentError("output length does not match sampler dimension");
  Eigen::VectorXd z(out.size());
  standard_normals(rng, z);
  out.noalias() = factor_.lower.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd GaussianSampler::draw(Rng& rng) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  draw(rng, out);
  return out;
}

std::vector<SampleFunction> sample_gp(const Grid& grid, const Eigen::MatrixXd& covariance,
                                      std::size_t count, std::uint64_t seed,
                                      std::uint32_t channel) {
  if (covariance.rows() != static_cast<Eigen::Index>(grid.size()) ||
      covariance.cols() != static_cast<Eigen::Index>(grid.size()))
    throw ArgumentError("covariance dimension does not match the grid");
  if (count < 1) throw ArgumentError("sample count must be >= 1");
  const GaussianSampler sampler(covariance);
  std::vector<SampleFunction> out(count);
  parallel_for(count, [&](std::size_t i) {
    Rng rng = substream(seed, channel, static_cast<std::uint32_t>(i));
    out[i] = sampler.draw(rng);
  });
  return out;
}

IncrementSampler::IncrementSampler(const Grid& grid, const Variogram& variogram)
    : size_(grid.size()), origin_(grid.origin_index()), others_(sites_except(grid.size(), grid.origin_index())) {
  if (!others_.empty())
    lower_ = cholesky_psd(submatrix(increment_covariance(grid, variogram), others_)).lower;
}

void IncrementSampler::draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  if (static_cast<std::size_t>(out.size()) != size_)
    throw ArgumentError("output length does not match sampler dimension");
  out(static_cast<Eigen::Index>(origin_)) = 0.0;
  if (others_.empty()) return;
  Eigen::VectorXd z(static_cast<Eigen::Index>(others_.size()));
  standard_normals(rng, z);
  const Eigen::VectorXd w = lower_.triangularView<Eigen::Lower>() * z;
  for (std::size_t k = 0; k < others_.size(); ++k) out(others_[k]) = w(static_cast<Eigen::Index>(k));
}

Eigen::VectorXd IncrementSampler::draw(Rng& rng) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size_));
  draw(rng, out);
  return out;
}

SampleFunction sample_W(const Grid& grid, const Variogram& variogram, std::uint64_t seed,
                        std::uint32_t index) {
  Rng rng = substream(seed, 0, index);
  return IncrementSampler(grid, variogram).draw(rng);
}

SampleFunction lognormal_X(const SampleFunction& z, SampleSize n) {
  const double b = scaling_bn(n);
  SampleFunction x = (b * (z.array() - b)).exp().matrix();
  if (!x.allFinite() || (x.array() <= 0.0).any())
    throw NumericalError("log-normal transform produced a non-finite or zero value");
  return x;
}

SampleFunction conditional_mean(double w, SampleSize n, const Grid& grid,
                                const Variogram& variogram) {
  const CovarianceFamily family(variogram, n);
  const double b2 = std::pow(scaling_bn(n), 2);
  const auto o = grid.origin_index();
  SampleFunction mean(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double r = family.correlation(variogram(grid, t, o));
    mean(static_cast<Eigen::Index>(t)) = w * r + b2 * (r - 1.0);
  }
  return mean;
}

Eigen::MatrixXd conditional_cov(SampleSize n, const Grid& grid, const Variogram& variogram) {
  const CovarianceFamily family(variogram, n);
  const double b2 = std::pow(scaling_bn(n), 2);
  const Eigen::MatrixXd r = family.matrix(grid);
  const Eigen::VectorXd r0 = r.col(static_cast<Eigen::Index>(grid.origin_index()));
  Eigen::MatrixXd cov = b2 * (r - r0 * r0.transpose());
  // Exact zeros on the origin row and column; r(t0, t0) = 1.
  const auto o = static_cast<Eigen::Index>(grid.origin_index());
  cov.row(o).setZero();
  cov.col(o).setZero();
  return cov;
}

ConditionalSampler::ConditionalSampler(double w, SampleSize n, const Grid& grid,
                                       const Variogram& variogram)
    : mean_(conditional_mean(w, n, grid, variogram)),
      origin_(grid.origin_index()),
      others_(sites_except(grid.size(), grid.origin_index())) {
  if (!others_.empty())
    lower_ = cholesky_psd(submatrix(conditional_cov(n, grid, variogram), others_)).lower;
}

Eigen::VectorXd ConditionalSampler::draw(Rng& rng) const {
  Eigen::VectorXd out = mean_;
  if (others_.empty()) return out;
  Eigen::VectorXd z(static_cast<Eigen::Index>(others_.size()));
  standard_normals(rng, z);
  const Eigen::VectorXd dev = lower_.triangularView<Eigen::Lower>() * z;
  for (std::size_t k = 0; k < others_.size(); ++k) out(others_[k]) += dev(static_cast<Eigen::Index>(k));
  return out;
}

LogNormalSampler::LogNormalSampler(const Grid& grid, const Variogram& variogram, SampleSize n)
    : bn_(scaling_bn(n)), gauss_(CovarianceFamily(variogram, n).matrix(grid)) {}

void LogNormalSampler::draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const {
  gauss_.draw(rng, out);
  out = (bn_ * (out.array() - bn_)).exp().matrix();
  if (!out.allFinite()) throw NumericalError("log-normal draw overflowed");
}

Eigen::VectorXd LogNormalSampler::draw(Rng& rng) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  draw(rng, out);
  return out;
}

Estimate exceedance_rate(const Grid& grid, const Variogram& variogram, SampleSize n,
                         const ExceedanceSet& set, std::size_t draws, std::uint64_t seed,
                         TailEstimator estimator, std::uint32_t channel) {
  if (set.sites.empty() || set.sites.size() != set.thresholds.size())
    throw ArgumentError("exceedance set needs matching, nonempty sites and thresholds");
  if (draws < 2) throw ArgumentError("exceedance_rate needs at least 2 draws");
  for (double z : set.thresholds)
    if (!(z > 0.0)) throw ArgumentError("exceedance thresholds must be positive");

  const Grid sub = grid.restrict_to(set.sites);
  const Eigen::MatrixXd corr = CovarianceFamily(variogram, n).matrix(sub);
  const GaussianSampler gauss(corr);
  const double b = scaling_bn(n);
  const auto k = static_cast<Eigen::Index>(set.sites.size());
  // Levels in Z space: X(t) >= z  <=>  Z(t) >= b + log(z) / b.
  Eigen::VectorXd level(k);
  for (Eigen::Index i = 0; i < k; ++i) level(i) = b + std::log(set.thresholds[static_cast<std::size_t>(i)]) / b;

  const auto moments = detail::chunked_moments(
      draws, 1, seed, channel, [&](Rng& rng, std::span<double> value) {
        std::uniform_int_distribution<Eigen::Index> pick(0, k - 1);
        Eigen::VectorXd z(k);
        gauss.draw(rng, z);
        double weight = 1.0;
        if (estimator == TailEstimator::importance) {
          const Eigen::Index j = pick(rng);
          z += level(j) * corr.col(j);
          double mixture = 0.0;
          for (Eigen::Index i = 0; i < k; ++i)
            mixture += std::exp(level(i) * z(i) - 0.5 * level(i) * level(i));
          weight = static_cast<double>(k) / mixture;
        }
        const bool hit = ((z - level).array() >= 0.0).any();
        value[0] = hit ? weight : 0.0;
      });
  const double scale = n.value();
  return {scale * moments.mean(0), scale * moments.standard_error(0)};
}

}  // namespace superx
