#pragma once

// Poisson point measures on (nonzero functions) x [0, M] with intensity
// nu (x) Lebesgue, where nu is homogeneous of order -alpha and described by a
// spectral sampler, plus the maxima and order-statistic functionals.

#include "superx/domain.hpp"
#include "superx/empirical.hpp"
#include "superx/gauss.hpp"
#include "superx/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace superx {

/// One point of the measure in polar form: raw function = magnitude * spectral.
struct Atom {
  double magnitude = 0.0;     ///< sup norm of the raw function, in (0, inf)
  SampleFunction spectral;    ///< unit sup norm profile
  double time = 0.0;          ///< arrival mark in [0, horizon]

  double value(std::size_t site) const { return magnitude * spectral(static_cast<Eigen::Index>(site)); }
};

/// Polar decomposition of a nonzero nonnegative function.
Atom polar_atom(const SampleFunction& raw, double time);

struct PointMeasure {
  std::vector<Atom> atoms;
  double horizon = 1.0;
  std::size_t truncation_count = 0;  ///< K, the number of radial arrivals kept
  double radial_floor = 0.0;         ///< smallest kept radius (Gamma_K / M)^{-1/alpha}
  double profile_max = 0.0;          ///< largest sup V among the kept profiles

  std::size_t sites() const;
  /// Throws ArgumentError when an atom violates the measure invariants.
  void validate() const;
};

/// Random profile V with nu(A) = int P[w V in A] alpha w^{-alpha-1} dw.
class SpectralSampler {
 public:
  virtual ~SpectralSampler() = default;

  virtual double alpha() const = 0;
  virtual std::size_t size() const = 0;
  virtual void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const = 0;

  Eigen::VectorXd draw(Rng& rng) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
    draw(rng, out);
    return out;
  }
};

/// V == 1. Every one-site law of the resulting process is Frechet.
class DegenerateSpectral final : public SpectralSampler {
 public:
  DegenerateSpectral(std::size_t sites, double alpha = 1.0);

  double alpha() const override { return alpha_; }
  std::size_t size() const override { return sites_; }
  using SpectralSampler::draw;
  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  std::size_t sites_;
  double alpha_;
};

/// V(t) = exp(W(t) - Gamma(t, t0) / 2), so V(t0) = 1 and E[V(t)] = 1.
class BrownResnickSpectral final : public SpectralSampler {
 public:
  BrownResnickSpectral(const Grid& grid, const Variogram& variogram, double alpha = 1.0);

  double alpha() const override { return alpha_; }
  std::size_t size() const override { return increments_.size(); }
  using SpectralSampler::draw;
  void draw(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const override;

 private:
  IncrementSampler increments_;
  Eigen::VectorXd drift_;
  double alpha_;
};

/// K atoms: Gamma_k are unit-rate arrival times, R_k = (Gamma_k / M)^{-1/alpha},
/// U_k uniform on [0, M], raw function R_k V_k. Exact-duplicate times are
/// resampled.
PointMeasure sample_ppp(const SpectralSampler& sampler, double horizon, std::size_t count,
                        Rng& rng);
PointMeasure sample_ppp(const SpectralSampler& sampler, double horizon, std::size_t count,
                        std::uint64_t seed, std::uint32_t channel = 0, std::uint32_t index = 0);

/// Values below this level may be affected by truncation at K atoms: the
/// smallest kept radius times the largest profile sup seen in the sample.
double truncation_bound(const PointMeasure& pm);

/// Pointwise sup of magnitude * spectral; zero for an empty measure.
SampleFunction theta_map(const PointMeasure& pm, std::size_t sites = 0);

/// Pointwise sup over atoms with time <= u, at each u of `time_grid`.
CadlagMaxProcess theta_tilde_map(const PointMeasure& pm, std::span<const double> time_grid,
                                 std::size_t sites = 0);

/// rank-th largest of {value(site) : time <= u}; 0 when fewer atoms qualify.
double order_stat_map(const PointMeasure& pm, std::size_t rank, double u, std::size_t site);

/// Order statistics 1..ranks at once, descending and zero padded.
std::vector<double> order_stats(const PointMeasure& pm, std::size_t ranks, double u,
                                std::size_t site);

/// One JSON object per atom: {"r": ..., "u": ..., "s": [...]}; `realization`
/// is included when nonnegative.
void write_point_measure_jsonl(std::ostream& out, const PointMeasure& pm,
                               std::int64_t realization = -1);
/// Reads what write_point_measure_jsonl wrote (one measure).
PointMeasure read_point_measure_jsonl(std::istream& in, double horizon);

}  // namespace superx
