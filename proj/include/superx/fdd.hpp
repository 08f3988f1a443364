#pragma once

// Finite-dimensional laws of the superextremal limit: Monte Carlo evaluation
// of the exponent measure on finite-site exceedance sets and the product
// formula for joint distribution functions over several times.

#include "superx/empirical.hpp"
#include "superx/gauss.hpp"
#include "superx/ppp.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace superx {

/// P[M(u_j, t_i) <= y(j, i) for all j, i] with 0 < u_1 < ... < u_k.
struct FddQuery {
  std::vector<double> times;
  std::vector<std::size_t> sites;
  Eigen::MatrixXd thresholds;  ///< times x sites, strictly positive

  void validate() const;
  void validate(const Grid& grid) const;
};

FddQuery fdd_query_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const FddQuery& q);

/// nu({f : f(t_i) >= z_i for some i}) = E[max_i (V(t_i) / z_i)^alpha].
Estimate exponent_nu(std::span<const std::size_t> sites, std::span<const double> thresholds,
                     const SpectralSampler& sampler, std::size_t draws, std::uint64_t seed,
                     std::uint32_t channel = 0);

/// Same quantity from the radial representation
///   int_{w_min}^{w_max} P[w V in A] alpha w^{-alpha-1} dw,
/// by Monte Carlo over (w, V) with w stratified on a log grid. Only useful as
/// a cross-check; it carries truncation error from the w range.
Estimate exponent_nu_radial(std::span<const std::size_t> sites, std::span<const double> thresholds,
                            const SpectralSampler& sampler, std::size_t strata,
                            std::size_t per_stratum, std::uint64_t seed, double w_min = 1e-3,
                            double w_max = 1e3, std::uint32_t channel = 0);

/// z(j, i) = min over rows k >= j of y(k, i).
Eigen::MatrixXd nested_thresholds(const FddQuery& q);

struct FddResult {
  double probability = 0.0;
  double standard_error = 0.0;
  std::vector<Estimate> factors;  ///< nu(A_j) estimates
  Eigen::MatrixXd levels;         ///< nested thresholds z(j, i)
};

/// prod_j exp(-(u_j - u_{j-1}) nu(A_j)) with one shared set of spectral
/// draws for all factors. The standard error is the delta-method error of
/// the exponent sum, which accounts for the correlation between factors.
FddResult fdd_probability(const FddQuery& q, const SpectralSampler& sampler, std::size_t draws,
                          std::uint64_t seed, std::uint32_t channel = 0);

/// Fraction of realizations below the thresholds at every (u_j, t_i), with
/// its binomial standard error. Every query time must be on the
/// realization's time grid.
Estimate fdd_empirical(std::span<const CadlagMaxProcess> realizations, const FddQuery& q);

nlohmann::ordered_json to_json(const FddResult& r);

}  // namespace superx
