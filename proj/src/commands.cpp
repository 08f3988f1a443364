#include "superx/commands.hpp"

#include "superx/empirical.hpp"
#include "superx/errors.hpp"
#include "superx/parallel.hpp"
#include "superx/ppp.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace superx {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kLimitChannel = 1;
constexpr std::uint32_t kPrelimitChannel = 2;
constexpr std::uint32_t kConvergenceChannel = 0x1000;
constexpr std::uint32_t kExponentChannel = 0x2000;
constexpr std::uint32_t kDiagnosticChannel = 0x3000;
constexpr std::uint32_t kFddTheoryChannel = 0x4000;
constexpr std::uint32_t kFddEmpiricalChannel = 0x4001;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
std::string joined(const std::vector<T>& values) {
  std::ostringstream s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s << ';';
    if constexpr (std::is_floating_point_v<T>)
      s << num(values[i]);
    else
      s << values[i];
  }
  return s.str();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void prepare(const RunConfig& cfg, const fs::path& out, std::vector<fs::path>& files) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + out.string());
  set_worker_count(cfg.workers);
  const fs::path path = out / "resolved_config.json";
  auto file = open_output(path);
  file << to_json(cfg).dump(2) << '\n';
  files.push_back(path);
}

void finish(std::ofstream& file, const fs::path& path) {
  file.flush();
  if (!file) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<fs::path> cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  std::vector<fs::path> files;
  prepare(cfg, out, files);
  const Grid grid = cfg.make_grid();
  const std::uint64_t seed = *cfg.seed;

  {
    const fs::path path = out / "grid.csv";
    auto file = open_output(path);
    write_grid_csv(file, grid);
    finish(file, path);
    files.push_back(path);
  }

  if (cfg.side == "limit" || cfg.side == "both") {
    const auto sampler = cfg.make_sampler(grid);
    std::vector<PointMeasure> measures(cfg.realizations);
    std::vector<CadlagMaxProcess> processes(cfg.realizations);
    parallel_for(cfg.realizations, [&](std::size_t i) {
      measures[i] = sample_ppp(*sampler, cfg.horizon, cfg.truncation, seed, kLimitChannel,
                               static_cast<std::uint32_t>(i));
      processes[i] = theta_tilde_map(measures[i], cfg.time_grid, grid.size());
    });

    const fs::path path = out / "limit_realizations.csv";
    auto file = open_output(path);
    for (std::size_t i = 0; i < processes.size(); ++i)
      write_process_csv(file, processes[i], static_cast<std::int64_t>(i), i == 0);
    finish(file, path);
    files.push_back(path);

    const fs::path bound_path = out / "truncation.csv";
    auto bounds = open_output(bound_path);
    bounds << "realization,atoms,radial_floor,profile_max,bound\n";
    for (std::size_t i = 0; i < measures.size(); ++i)
      bounds << i << ',' << measures[i].truncation_count << ',' << num(measures[i].radial_floor) << ','
             << num(measures[i].profile_max) << ',' << num(truncation_bound(measures[i])) << '\n';
    finish(bounds, bound_path);
    files.push_back(bound_path);

    if (cfg.write_point_measures) {
      const fs::path pm_path = out / "point_measures.jsonl";
      auto pm_file = open_output(pm_path);
      for (std::size_t i = 0; i < measures.size(); ++i)
        write_point_measure_jsonl(pm_file, measures[i], static_cast<std::int64_t>(i));
      finish(pm_file, pm_path);
      files.push_back(pm_path);
    }
  }

  if (cfg.side == "prelimit" || cfg.side == "both") {
    const SampleSize n(cfg.prelimit_n);
    const LogNormalSampler sampler(grid, cfg.make_variogram(), n);
    const auto block = static_cast<std::size_t>(cfg.prelimit_n);
    const std::size_t needed = active_count(block, cfg.time_grid.back());
    std::vector<CadlagMaxProcess> processes(cfg.realizations);
    parallel_for(cfg.realizations, [&](std::size_t i) {
      Rng rng = substream(seed, kPrelimitChannel, static_cast<std::uint32_t>(i));
      std::vector<SampleFunction> batch(std::max<std::size_t>(needed, 1));
      for (auto& f : batch) f = sampler.draw(rng);
      processes[i] = partial_maxima(batch, block, cfg.time_grid);
    });
    const fs::path path = out / "prelimit_realizations.csv";
    auto file = open_output(path);
    for (std::size_t i = 0; i < processes.size(); ++i)
      write_process_csv(file, processes[i], static_cast<std::int64_t>(i), i == 0);
    finish(file, path);
    files.push_back(path);
  }
  return files;
}

std::vector<ConvergenceRow> convergence_table(const RunConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  const Variogram variogram = cfg.make_variogram();
  // The log-normal construction converges to the alpha = 1 Brown-Resnick
  // exponent measure whatever sampler the config selects for simulation.
  const BrownResnickSpectral limit(grid, variogram, 1.0);
  const auto sets = cfg.resolved_exceedance_sets();

  std::vector<Estimate> exponents;
  for (std::size_t s = 0; s < sets.size(); ++s)
    exponents.push_back(exponent_nu(sets[s].sites, sets[s].thresholds, limit, cfg.nu_draws, *cfg.seed,
                                    kExponentChannel + static_cast<std::uint32_t>(s)));

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < cfg.n_list.size(); ++k)
    for (std::size_t s = 0; s < sets.size(); ++s) {
      ConvergenceRow row;
      row.n = cfg.n_list[k];
      row.set_index = s;
      row.set = sets[s];
      row.scaled_probability =
          exceedance_rate(grid, variogram, SampleSize(row.n), sets[s], cfg.convergence_draws, *cfg.seed,
                          cfg.tail_estimator(),
                          kConvergenceChannel + static_cast<std::uint32_t>(k * sets.size() + s));
      row.exponent = exponents[s];
      rows.push_back(std::move(row));
    }
  return rows;
}

std::vector<fs::path> cmd_convergence(const RunConfig& cfg, const fs::path& out) {
  std::vector<fs::path> files;
  prepare(cfg, out, files);
  const auto rows = convergence_table(cfg);
  {
    const fs::path path = out / "convergence.csv";
    auto file = open_output(path);
    file << "n,set,sites,z,n_p_hat,n_p_se,nu_hat,nu_se,abs_diff\n";
    for (const auto& r : rows)
      file << r.n << ',' << r.set_index << ',' << joined(r.set.sites) << ',' << joined(r.set.thresholds) << ','
           << num(r.scaled_probability.value) << ',' << num(r.scaled_probability.standard_error) << ','
           << num(r.exponent.value) << ',' << num(r.exponent.standard_error) << ','
           << num(std::abs(r.scaled_probability.value - r.exponent.value)) << '\n';
    finish(file, path);
    files.push_back(path);
  }

  // Correlation r_n(t0, t) from the closed form next to its sample value.
  const Grid grid = cfg.make_grid();
  const Variogram variogram = cfg.make_variogram();
  const fs::path path = out / "gauss_diagnostics.csv";
  auto file = open_output(path);
  file << "n,site_i,site_j,formula,empirical\n";
  const std::size_t o = grid.origin_index();
  for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
    const CovarianceFamily family(variogram, SampleSize(cfg.n_list[k]));
    const Eigen::MatrixXd corr = family.matrix(grid);
    const auto draws = sample_gp(grid, corr, cfg.diagnostic_draws, *cfg.seed,
                                 kDiagnosticChannel + static_cast<std::uint32_t>(k));
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(draws.size()), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t d = 0; d < draws.size(); ++d) samples.row(static_cast<Eigen::Index>(d)) = draws[d].transpose();
    const Eigen::RowVectorXd mean = samples.colwise().mean();
    const Eigen::MatrixXd centered = samples.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(draws.size() - 1);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j == o) continue;
      const auto oi = static_cast<Eigen::Index>(o), ji = static_cast<Eigen::Index>(j);
      const double empirical = cov(oi, ji) / std::sqrt(cov(oi, oi) * cov(ji, ji));
      file << cfg.n_list[k] << ',' << o << ',' << j << ',' << num(corr(oi, ji)) << ',' << num(empirical) << '\n';
    }
  }
  finish(file, path);
  files.push_back(path);
  return files;
}

std::vector<TestReport> test_suite(const RunConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  const std::size_t site = cfg.resolved_test_site();
  LimitSampling sampling;
  sampling.samples = cfg.test_samples;
  sampling.truncation = cfg.truncation;
  sampling.significance = cfg.significance;
  sampling.seed = *cfg.seed;

  std::vector<TestReport> reports;
  auto tag = [](TestReport r, const std::string& name) {
    r.description = name + " " + r.description;
    return r;
  };
  for (const auto& kind : cfg.test_samplers) {
    const auto sampler = cfg.make_sampler(grid, kind);
    for (auto m : cfg.test_copies)
      reports.push_back(tag(test_max_stability(*sampler, m, cfg.test_u, site, sampling), kind));
    for (double c : cfg.test_scales)
      reports.push_back(tag(test_self_similarity(*sampler, c, cfg.test_u, site, sampling), kind));
    reports.push_back(tag(test_markov(*sampler, cfg.markov_u, cfg.markov_h, site, sampling), kind));
    // The Poisson-count law needs V == 1 at the site.
    if (kind == "degenerate" || site == grid.origin_index())
      for (auto r : cfg.test_ranks)
        reports.push_back(
            tag(test_order_stat_law(*sampler, r, cfg.test_u, site, cfg.order_law_distance, sampling), kind));
  }

  // Pre-limit order statistics converge to the alpha = 1 Brown-Resnick limit.
  const Variogram variogram = cfg.make_variogram();
  const BrownResnickSpectral limit(grid, variogram, 1.0);
  for (auto r : cfg.test_ranks) {
    const auto conv = test_order_stats_limit(grid, variogram, limit, cfg.n_list, r, cfg.test_u, site, sampling,
                                             cfg.order_trend_slack);
    for (const auto& d : conv.distances) reports.push_back(d);
    reports.push_back(conv.trend);
  }
  return reports;
}

int cmd_test(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  std::vector<fs::path> files;
  prepare(cfg, out, files);
  const auto reports = test_suite(cfg);
  const fs::path path = out / "test_reports.jsonl";
  auto file = open_output(path);
  bool ok = true;
  for (const auto& r : reports) {
    append_report_jsonl(file, r);
    const char* status = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
    log << status << "  " << r.description << "  statistic=" << r.statistic << " threshold=" << r.threshold
        << '\n';
    if (!r.informational && !r.pass) ok = false;
  }
  finish(file, path);
  return ok ? kExitOk : kExitTestFailure;
}

FddComparison fdd_comparison(const RunConfig& cfg, const FddQuery& query) {
  cfg.validate();
  const Grid grid = cfg.make_grid();
  query.validate(grid);
  const auto sampler = cfg.make_sampler(grid);

  FddComparison cmp;
  cmp.query = query;
  cmp.theoretical = fdd_probability(query, *sampler, cfg.nu_draws, *cfg.seed, kFddTheoryChannel);
  cmp.realizations = cfg.fdd_realizations;
  // The last query time is the horizon, so every query time is on the grid.
  const double horizon = query.times.back();
  std::vector<CadlagMaxProcess> processes(cfg.fdd_realizations);
  parallel_for(cfg.fdd_realizations, [&](std::size_t i) {
    const PointMeasure pm =
        sample_ppp(*sampler, horizon, cfg.truncation, *cfg.seed, kFddEmpiricalChannel, static_cast<std::uint32_t>(i));
    processes[i] = theta_tilde_map(pm, query.times, grid.size());
  });
  cmp.empirical = fdd_empirical(processes, query);
  return cmp;
}

std::vector<fs::path> cmd_fdd(const RunConfig& cfg, const FddQuery& query, const fs::path& out) {
  std::vector<fs::path> files;
  prepare(cfg, out, files);
  const auto cmp = fdd_comparison(cfg, query);
  nlohmann::ordered_json j;
  j["query"] = to_json(cmp.query);
  j["theoretical"] = to_json(cmp.theoretical);
  j["empirical"] = {{"probability", cmp.empirical.value},
                    {"standard_error", cmp.empirical.standard_error},
                    {"realizations", cmp.realizations}};
  j["difference"] = cmp.empirical.value - cmp.theoretical.probability;
  j["combined_standard_error"] =
      std::hypot(cmp.empirical.standard_error, cmp.theoretical.standard_error);
  const fs::path path = out / "fdd_result.json";
  auto file = open_output(path);
  file << j.dump(2) << '\n';
  finish(file, path);
  files.push_back(path);
  return files;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Simulation and verification of superextremal limits of partial maxima"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string query_path;
  std::optional<std::size_t> workers;
  app.add_option("--config", config_path, "run configuration (flat JSON or key = value lines)")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  auto* simulate = app.add_subcommand("simulate", "write superextremal and/or partial-maxima realizations");
  auto* convergence = app.add_subcommand("convergence", "tabulate n P[X_n in A] against nu(A)");
  auto* test = app.add_subcommand("test", "run the pinned-seed property suite");
  auto* fdd = app.add_subcommand("fdd", "theoretical vs empirical finite-dimensional probabilities");
  fdd->add_option("--query", query_path, "fdd query JSON file")->required();
  for (auto* sub : {simulate, convergence, test, fdd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers) cfg.workers = *workers;
    const fs::path out = cfg.out_dir;
    if (simulate->parsed()) {
      cmd_simulate(cfg, out);
    } else if (convergence->parsed()) {
      cmd_convergence(cfg, out);
    } else if (test->parsed()) {
      return cmd_test(cfg, out, std::cout);
    } else if (fdd->parsed()) {
      std::ifstream in(query_path);
      if (!in) throw ConfigError("cannot read query file " + query_path);
      nlohmann::json q;
      try {
        q = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("query file is not valid JSON: ") + e.what());
      }
      cmd_fdd(cfg, fdd_query_from_json(q), out);
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace superx
