#include "doctest.h"

#include "superx/config.hpp"
#include "superx/errors.hpp"
#include "superx/ppp.hpp"

using namespace superx;

TEST_CASE("JSON configs") {
  const RunConfig c = parse_config(R"({"dimension": 2, "resolution": 4, "alpha": 1.5,
      "sampler": "degenerate", "seed": 99, "n_list": [10, 20],
      "exceedance_sets": [{"sites": [0, 3], "z": [1.0, 2.0]}]})");
  CHECK(c.grid.dimension == 2);
  CHECK(c.grid.resolution == 4);
  CHECK(c.alpha == 1.5);
  CHECK(c.sampler == "degenerate");
  CHECK(*c.seed == 99);
  CHECK(c.n_list == std::vector<std::int64_t>{10, 20});
  REQUIRE(c.exceedance_sets.size() == 1);
  CHECK(c.exceedance_sets[0].thresholds[1] == 2.0);
  CHECK_NOTHROW(c.validate());
  CHECK(c.make_sampler(c.make_grid())->size() == 16);
}

TEST_CASE("key = value configs") {
  const RunConfig c = parse_config(
      "# comment line\n"
      "resolution = 7\n"
      "sampler = brown_resnick   # trailing comment\n"
      "time_grid = [0.5, 1.0]\n"
      "write_point_measures = true\n"
      "seed = 3\n");
  CHECK(c.grid.resolution == 7);
  CHECK(c.sampler == "brown_resnick");
  CHECK(c.time_grid == std::vector<double>{0.5, 1.0});
  CHECK(c.write_point_measures);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(R"({"resolutoin": 5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"resolution": "five"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("resolution 5"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}").validate(), ConfigError);  // no seed
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "dimension": 2, "resolution": 30})").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "sampler": "gumbel"})").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "time_grid": [0.5, 0.2]})").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "time_grid": [2.0]})").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "variogram_exponent": 3})").validate(), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "exceedance_sets": [{"sites": [99], "z": [1]}]})").validate(),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("resolved config round trip") {
  RunConfig c = parse_config(R"({"seed": 5, "resolution": 6, "out_dir": "elsewhere", "workers": 3})");
  const auto j = to_json(c);
  CHECK(j.at("seed") == 5);
  CHECK_FALSE(j.contains("out_dir"));
  CHECK_FALSE(j.contains("workers"));
  CHECK(j.at("exceedance_sets")[0].at("z")[0] == 1.0);
  const RunConfig back = parse_config(j.dump());
  CHECK(to_json(back) == j);
}
