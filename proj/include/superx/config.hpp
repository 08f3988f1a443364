#pragma once

#include "superx/domain.hpp"
#include "superx/gauss.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace superx {

class SpectralSampler;

/// Everything a harness run depends on. Commands are pure functions of a
/// RunConfig, so the resolved config written next to the outputs is enough
/// to replay a run.
struct RunConfig {
  GridSpec grid;
  double variogram_scale = 1.0;
  double variogram_exponent = 1.0;
  double alpha = 1.0;
  std::string sampler = "brown_resnick";  ///< "brown_resnick" or "degenerate"
  double horizon = 1.0;
  std::size_t truncation = 1000;

  // simulate
  std::string side = "limit";  ///< "limit", "prelimit" or "both"
  std::size_t realizations = 100;
  std::int64_t prelimit_n = 100;
  std::vector<double> time_grid{0.25, 0.5, 0.75, 1.0};
  bool write_point_measures = false;

  // convergence and fdd
  std::vector<std::int64_t> n_list{100, 1000, 10000};
  std::size_t convergence_draws = 100000;
  std::string estimator = "importance";  ///< "importance" or "crude"
  std::vector<ExceedanceSet> exceedance_sets;  ///< empty: {f : f(t0) >= 1}
  std::size_t nu_draws = 100000;
  std::size_t diagnostic_draws = 10000;
  std::size_t fdd_realizations = 10000;

  // test
  std::size_t test_samples = 10000;
  double significance = 0.01;
  double test_u = 1.0;
  std::vector<std::size_t> test_copies{2, 3};
  std::vector<double> test_scales{0.5, 2.0};
  double markov_u = 0.5;
  double markov_h = 0.5;
  std::vector<std::string> test_samplers{"degenerate", "brown_resnick"};
  std::vector<std::size_t> test_ranks{2, 3};
  double order_law_distance = 0.03;
  double order_trend_slack = 0.01;
  std::optional<std::size_t> test_site;  ///< default: grid origin

  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::size_t workers = 0;

  /// Throws ConfigError on inconsistent values or a missing seed.
  void validate() const;

  Grid make_grid() const;
  Variogram make_variogram() const;
  std::unique_ptr<SpectralSampler> make_sampler(const Grid& grid, const std::string& kind) const;
  std::unique_ptr<SpectralSampler> make_sampler(const Grid& grid) const {
    return make_sampler(grid, sampler);
  }
  std::vector<ExceedanceSet> resolved_exceedance_sets() const;
  std::size_t resolved_test_site() const;
  TailEstimator tail_estimator() const;
};

/// Flat JSON object, or `key = value` lines whose values are JSON literals
/// (bare words are read as strings; `#` starts a comment).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// All fields including defaults.
nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace superx
