#include "doctest.h"

#include "superx/commands.hpp"
#include "superx/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace superx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("superx_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    rows.emplace_back();
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) rows.back().push_back(cell);
  }
  return rows;
}

RunConfig small_config() {
  RunConfig c = parse_config(R"({"resolution": 4, "seed": 17, "realizations": 20, "truncation": 200,
      "side": "both", "prelimit_n": 50, "write_point_measures": true,
      "n_list": [10, 100], "convergence_draws": 2000, "nu_draws": 2000, "diagnostic_draws": 500,
      "fdd_realizations": 300, "test_samples": 300, "test_copies": [2], "test_scales": [2.0],
      "test_ranks": [2], "test_samplers": ["degenerate"], "order_law_distance": 0.1,
      "order_trend_slack": 0.2})");
  return c;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(SUPERX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("simulate writes consistent outputs") {
  const RunConfig cfg = small_config();
  const fs::path out = scratch("simulate");
  const auto files = cmd_simulate(cfg, out);
  for (const char* name : {"resolved_config.json", "grid.csv", "limit_realizations.csv", "truncation.csv",
                           "point_measures.jsonl", "prelimit_realizations.csv"})
    CHECK(fs::exists(out / name));
  CHECK(files.size() == 6);

  for (const char* name : {"limit_realizations.csv", "prelimit_realizations.csv"}) {
    const auto rows = csv_rows(out / name);
    REQUIRE(rows.size() == 1 + 20 * 4 * 4);
    CHECK(rows[0] == std::vector<std::string>{"realization", "u", "site", "value"});
    // Rows are (realization, u, site) in order; check nondecreasing in u per site.
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const double v = std::stod(rows[r][3]);
      CHECK(v >= 0.0);
      if (r > 4 && rows[r][0] == rows[r - 4][0]) CHECK(v >= std::stod(rows[r - 4][3]));
    }
  }
  // The limit side at the last time is strictly positive at every site.
  const auto limit = csv_rows(out / "limit_realizations.csv");
  for (std::size_t r = 1; r < limit.size(); ++r)
    if (limit[r][1] == "1") CHECK(std::stod(limit[r][3]) > 0.0);

  const fs::path again = scratch("simulate_again");
  cmd_simulate(cfg, again);
  for (const auto& f : files) CHECK(slurp(f) == slurp(again / f.filename()));
}

TEST_CASE("convergence and fdd outputs") {
  const RunConfig cfg = small_config();
  const fs::path out = scratch("convergence");
  cmd_convergence(cfg, out);
  const auto rows = csv_rows(out / "convergence.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "n");
  CHECK(rows[1][0] == "10");
  const auto diag = csv_rows(out / "gauss_diagnostics.csv");
  CHECK(diag.size() > 1);

  FddQuery q{{0.5, 1.0}, {0, 1}, Eigen::MatrixXd::Ones(2, 2)};
  const auto cmp = fdd_comparison(cfg, q);
  CHECK(cmp.theoretical.probability > 0.0);
  CHECK(cmp.theoretical.probability < 1.0);
  CHECK(cmp.realizations == 300);
  cmd_fdd(cfg, q, out);
  const auto j = nlohmann::json::parse(slurp(out / "fdd_result.json"));
  CHECK(j.contains("theoretical"));
  CHECK(j.contains("empirical"));
}

TEST_CASE("test command writes reports") {
  const RunConfig cfg = small_config();
  const fs::path out = scratch("suite");
  std::ostringstream log;
  const int code = cmd_test(cfg, out, log);
  CHECK(code == kExitOk);
  std::istringstream lines(slurp(out / "test_reports.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("statistic"));
    CHECK(j.contains("threshold"));
    ++count;
  }
  CHECK(count >= 4);
  CHECK(log.str().find("PASS") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  if (std::string(SUPERX_CLI_PATH).empty()) {
    MESSAGE("command line tool not built; skipped");
    return;
  }
  const fs::path dir = scratch("cli");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string good = write("good.json", R"({"resolution": 3, "realizations": 5, "truncation": 50,
      "seed": 1})");
  const std::string noseed = write("noseed.json", R"({"resolution": 3})");
  const std::string unknown = write("unknown.json", R"({"seed": 1, "bogus": 2})");
  const std::string overflow = write("overflow.json", R"({"seed": 1, "resolution": 3, "extent": 1e200,
      "variogram_exponent": 2, "realizations": 2, "truncation": 10})");
  const std::string query = write("q.json", R"({"times": [1], "sites": [0], "thresholds": [[1]]})");
  const std::string out = (dir / "out").string();

  CHECK(run_tool("--config " + good + " --out " + out + " simulate") == 0);
  CHECK(fs::exists(dir / "out" / "limit_realizations.csv"));
  CHECK(run_tool("--config " + noseed + " --out " + out + " simulate") == 2);
  CHECK(run_tool("--config " + noseed + " --seed 4 --out " + out + " simulate") == 0);
  CHECK(run_tool("--config " + unknown + " --out " + out + " simulate") == 2);
  CHECK(run_tool("--config " + overflow + " --out " + out + " simulate") == 3);
  CHECK(run_tool("--config " + good + " --out " + out + " fdd") == 2);
  CHECK(run_tool("--config " + good + " --out " + out + " fdd --query " + query) == 0);
  CHECK(run_tool("--config " + good + " --out " + out + " frobnicate") == 2);
  CHECK(run_tool("--config /nonexistent.json simulate") == 2);
}
