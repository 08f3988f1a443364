#include "superx/config.hpp"

#include "superx/errors.hpp"
#include "superx/ppp.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace superx {

namespace {

using Json = nlohmann::json;
using Setter = std::function<void(RunConfig&, const Json&)>;

template <typename T>
Setter assign(T RunConfig::*field) {
  return [field](RunConfig& c, const Json& v) { c.*field = v.get<T>(); };
}

template <typename T>
Setter assign_grid(T GridSpec::*field) {
  return [field](RunConfig& c, const Json& v) { c.grid.*field = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dimension", assign_grid(&GridSpec::dimension)},
      {"extent", assign_grid(&GridSpec::extent)},
      {"resolution", assign_grid(&GridSpec::resolution)},
      {"origin_index", assign_grid(&GridSpec::origin_index)},
      {"site_cap", assign_grid(&GridSpec::site_cap)},
      {"variogram_scale", assign(&RunConfig::variogram_scale)},
      {"variogram_exponent", assign(&RunConfig::variogram_exponent)},
      {"alpha", assign(&RunConfig::alpha)},
      {"sampler", assign(&RunConfig::sampler)},
      {"horizon", assign(&RunConfig::horizon)},
      {"truncation", assign(&RunConfig::truncation)},
      {"side", assign(&RunConfig::side)},
      {"realizations", assign(&RunConfig::realizations)},
      {"prelimit_n", assign(&RunConfig::prelimit_n)},
      {"time_grid", assign(&RunConfig::time_grid)},
      {"write_point_measures", assign(&RunConfig::write_point_measures)},
      {"n_list", assign(&RunConfig::n_list)},
      {"convergence_draws", assign(&RunConfig::convergence_draws)},
      {"estimator", assign(&RunConfig::estimator)},
      {"exceedance_sets",
       [](RunConfig& c, const Json& v) {
         c.exceedance_sets.clear();
         for (const auto& item : v)
           c.exceedance_sets.push_back({item.at("sites").get<std::vector<std::size_t>>(),
                                        item.at("z").get<std::vector<double>>()});
       }},
      {"nu_draws", assign(&RunConfig::nu_draws)},
      {"diagnostic_draws", assign(&RunConfig::diagnostic_draws)},
      {"fdd_realizations", assign(&RunConfig::fdd_realizations)},
      {"test_samples", assign(&RunConfig::test_samples)},
      {"significance", assign(&RunConfig::significance)},
      {"test_u", assign(&RunConfig::test_u)},
      {"test_copies", assign(&RunConfig::test_copies)},
      {"test_scales", assign(&RunConfig::test_scales)},
      {"markov_u", assign(&RunConfig::markov_u)},
      {"markov_h", assign(&RunConfig::markov_h)},
      {"test_samplers", assign(&RunConfig::test_samplers)},
      {"test_ranks", assign(&RunConfig::test_ranks)},
      {"order_law_distance", assign(&RunConfig::order_law_distance)},
      {"order_trend_slack", assign(&RunConfig::order_trend_slack)},
      {"test_site", [](RunConfig& c, const Json& v) { c.test_site = v.get<std::size_t>(); }},
      {"seed", [](RunConfig& c, const Json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"out_dir", assign(&RunConfig::out_dir)},
      {"workers", assign(&RunConfig::workers)},
  };
  return table;
}

void apply(RunConfig& cfg, const std::string& key, const Json& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for config key '" + key + "': " + e.what());
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_sampler_name(const std::string& s) { return s == "brown_resnick" || s == "degenerate"; }

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    Json j;
    try {
      j = Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) apply(cfg, key, value);
    return cfg;
  }
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    apply(cfg, key, value);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void RunConfig::validate() const {
  if (!seed) throw ConfigError("a seed is required (config key 'seed' or --seed)");
  try {
    const Grid g = make_grid();
    make_variogram();
    if (test_site) g.check_site(*test_site);
    for (const auto& set : resolved_exceedance_sets()) {
      if (set.sites.empty() || set.sites.size() != set.thresholds.size())
        throw ConfigError("exceedance set needs matching nonempty sites and z");
      for (auto s : set.sites) g.check_site(s);
      for (double z : set.thresholds)
        if (!(z > 0.0)) throw ConfigError("exceedance thresholds must be positive");
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const SizingError& e) {
    throw ConfigError(e.what());
  }
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!is_sampler_name(sampler)) throw ConfigError("sampler must be brown_resnick or degenerate");
  for (const auto& s : test_samplers)
    if (!is_sampler_name(s)) throw ConfigError("unknown test sampler '" + s + "'");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  if (side != "limit" && side != "prelimit" && side != "both")
    throw ConfigError("side must be limit, prelimit or both");
  if (estimator != "importance" && estimator != "crude")
    throw ConfigError("estimator must be importance or crude");
  if (truncation < 1 || realizations < 1 || convergence_draws < 2 || nu_draws < 2 ||
      diagnostic_draws < 2 || fdd_realizations < 1 || test_samples < 1)
    throw ConfigError("all sizes must be >= 1 (Monte Carlo draw counts >= 2)");
  if (prelimit_n < 2) throw ConfigError("prelimit_n must be >= 2");
  for (auto n : n_list)
    if (n < 2) throw ConfigError("n_list entries must be >= 2");
  if (time_grid.empty()) throw ConfigError("time_grid must be nonempty");
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    if (!(time_grid[k] >= 0.0 && time_grid[k] <= horizon))
      throw ConfigError("time_grid values must lie in [0, horizon]");
    if (k > 0 && !(time_grid[k] > time_grid[k - 1]))
      throw ConfigError("time_grid must be strictly increasing");
  }
  if (!(significance > 0.0 && significance < 1.0)) throw ConfigError("significance must be in (0, 1)");
  if (!(test_u > 0.0) || !(markov_u > 0.0) || !(markov_h >= 0.0))
    throw ConfigError("test times must be positive");
  for (auto m : test_copies)
    if (m < 1) throw ConfigError("test_copies entries must be >= 1");
  for (double c : test_scales)
    if (!(c > 0.0)) throw ConfigError("test_scales entries must be > 0");
  for (auto r : test_ranks)
    if (r < 1) throw ConfigError("test_ranks entries must be >= 1");
}

Grid RunConfig::make_grid() const { return build_grid(grid); }

Variogram RunConfig::make_variogram() const { return Variogram(variogram_scale, variogram_exponent); }

std::unique_ptr<SpectralSampler> RunConfig::make_sampler(const Grid& g, const std::string& kind) const {
  if (kind == "degenerate") return std::make_unique<DegenerateSpectral>(g.size(), alpha);
  if (kind == "brown_resnick") return std::make_unique<BrownResnickSpectral>(g, make_variogram(), alpha);
  throw ConfigError("unknown sampler '" + kind + "'");
}

std::vector<ExceedanceSet> RunConfig::resolved_exceedance_sets() const {
  if (!exceedance_sets.empty()) return exceedance_sets;
  return {ExceedanceSet{{grid.origin_index}, {1.0}}};
}

std::size_t RunConfig::resolved_test_site() const { return test_site.value_or(grid.origin_index); }

TailEstimator RunConfig::tail_estimator() const {
  return estimator == "crude" ? TailEstimator::crude : TailEstimator::importance;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["dimension"] = c.grid.dimension;
  j["extent"] = c.grid.extent;
  j["resolution"] = c.grid.resolution;
  j["origin_index"] = c.grid.origin_index;
  j["site_cap"] = c.grid.site_cap;
  j["variogram_scale"] = c.variogram_scale;
  j["variogram_exponent"] = c.variogram_exponent;
  j["alpha"] = c.alpha;
  j["sampler"] = c.sampler;
  j["horizon"] = c.horizon;
  j["truncation"] = c.truncation;
  j["side"] = c.side;
  j["realizations"] = c.realizations;
  j["prelimit_n"] = c.prelimit_n;
  j["time_grid"] = c.time_grid;
  j["write_point_measures"] = c.write_point_measures;
  j["n_list"] = c.n_list;
  j["convergence_draws"] = c.convergence_draws;
  j["estimator"] = c.estimator;
  auto sets = nlohmann::ordered_json::array();
  for (const auto& s : c.resolved_exceedance_sets()) {
    nlohmann::ordered_json item;
    item["sites"] = s.sites;
    item["z"] = s.thresholds;
    sets.push_back(item);
  }
  j["exceedance_sets"] = sets;
  j["nu_draws"] = c.nu_draws;
  j["diagnostic_draws"] = c.diagnostic_draws;
  j["fdd_realizations"] = c.fdd_realizations;
  j["test_samples"] = c.test_samples;
  j["significance"] = c.significance;
  j["test_u"] = c.test_u;
  j["test_copies"] = c.test_copies;
  j["test_scales"] = c.test_scales;
  j["markov_u"] = c.markov_u;
  j["markov_h"] = c.markov_h;
  j["test_samplers"] = c.test_samplers;
  j["test_ranks"] = c.test_ranks;
  j["order_law_distance"] = c.order_law_distance;
  j["order_trend_slack"] = c.order_trend_slack;
  j["test_site"] = c.resolved_test_site();
  if (c.seed) j["seed"] = *c.seed;
  // out_dir and workers do not affect results and are left out so that
  // reruns into different directories produce identical files.
  return j;
}

}  // namespace superx
