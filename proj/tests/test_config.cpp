#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dryfric/error.hpp"
#include "dryfric/run_config.hpp"

using namespace dryfric;

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const RunConfig c = default_config();
  CHECK(c.params.mu_s == 1.0);
  CHECK(c.params.tau == 1.0);
  CHECK(c.params.L_eta == 4.0);
  CHECK(c.n_excursions == 100000);
  CHECK(c.delta_list() == std::vector<double>{0.5});
  CHECK(c.omega_grid().size() == 64);
  CHECK(c.omega_grid().front() == -c.omega_grid().back());
  CHECK(c.target_cells().size() == 8);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"mu_dd": 0.3})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", {"detla=0.25"}), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("invalid values are config errors") {
  CHECK_THROWS_AS(parse_config(R"({"mu_d": 2.0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"delta": "x"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"p": [0]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"kappa_p": [63]})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{}", {"novalue"}), ConfigError);
}

TEST_CASE("overrides take precedence and are parsed as JSON") {
  const RunConfig c = parse_config(R"({"delta": 0.5, "p": [8]})", {"delta=0.25", "p=[4,8,16]", "grid_csv=in.csv"});
  CHECK(c.params.delta == 0.25);
  CHECK(c.p == std::vector<int>{4, 8, 16});
  CHECK(c.grid_csv == "in.csv");
  const RunConfig s = parse_config(R"({"deltas": 0.125})");
  CHECK(s.delta_list() == std::vector<double>{0.125});
}

TEST_CASE("hash tracks results, not scheduling") {
  const RunConfig a = parse_config(R"({"delta": 0.25})");
  const RunConfig b = parse_config(R"({"delta": 0.25, "threads": 8, "output_dir": "/tmp/x"})");
  const RunConfig c = parse_config(R"({"delta": 0.25, "seed": 2})");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("config files") {
  const auto path = (std::filesystem::temp_directory_path() / "dryfric_cfg_test.json").string();
  {
    std::ofstream out(path);
    out << R"({"mu_d": 0.5, "n_excursions": 1000})";
  }
  const RunConfig c = load_config(path, {"seed=9"});
  CHECK(c.params.mu_d == 0.5);
  CHECK(c.n_excursions == 1000);
  CHECK(c.params.seed == 9);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

}  // TEST_SUITE
