#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "rpspin/config.hpp"
#include "rpspin/csv.hpp"
#include "rpspin/errors.hpp"
#include "rpspin/experiments.hpp"

using namespace rpspin;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({"rates": {"k_S": 0.25, "k_T": 0.5}, "grid": {"dt": 0.01, "steps": 100}})";

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_json(a) == to_json(b);
}

}  // namespace

TEST_CASE("csv round trip") {
  const std::vector<double> t{0.0, 0.003, 1e-300, 30.0};
  const std::vector<double> v{1.0 / 3.0, -2.5e-17, std::numeric_limits<double>::quiet_NaN(),
                              0.1 + 0.2};
  CsvTable table = CsvTable::from_columns({"t", "value"}, {&t, &v});
  table.comments = {"first", "second"};
  std::stringstream ss;
  write_csv(ss, table);
  const std::string text = ss.str();
  CHECK(text.rfind("# first\n# second\nt,value\n0,", 0) == 0);
  CHECK(text.find("nan") != std::string::npos);

  CsvTable back = read_csv(ss);
  CHECK(back.comments == table.comments);
  CHECK(back.columns == table.columns);
  REQUIRE(back.rows.size() == 4);
  CHECK(back.column("t") == t);
  const auto bv = back.column("value");
  CHECK(bv[0] == v[0]);
  CHECK(bv[1] == v[1]);
  CHECK(std::isnan(bv[2]));
  CHECK(bv[3] == v[3]);
  CHECK_THROWS_AS(back.column("missing"), DomainError);
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_number(0.003) == "0.003");
  CHECK(format_number(30.0) == "30");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("malformed csv") {
  std::stringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), DomainError);
  std::stringstream empty("# only a comment\n");
  CHECK_THROWS_AS(read_csv(empty), DomainError);
  std::vector<double> a{1, 2}, b{1};
  CHECK_THROWS_AS(CsvTable::from_columns({"a", "b"}, {&a, &b}), DomainError);
}

TEST_CASE("minimal config and defaults") {
  ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.rates.k_s == 0.25);
  CHECK(c.rates.k_t == 0.5);
  CHECK(c.steps == 100);
  CHECK(c.horizon() == doctest::Approx(1.0));
  CHECK(c.nuclei.empty());
  CHECK(c.montecarlo.n_trajectories == 0);
  CHECK(c.montecarlo.dt == c.dt);
  CHECK(c.output == "out");

  ExperimentConfig h = parse_config(R"({"rates": {"k_S": 0, "k_T": 0}, "grid": {"dt": 0.003, "horizon": 30}})");
  CHECK(h.steps == 10000);
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error("{").rfind("config:", 0) == 0);
  CHECK(config_error(R"({"grid": {"dt": 0.1, "steps": 1}})").rfind("rates:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1}, "grid": {"dt": 0.1, "steps": 1}})")
            .rfind("rates.k_T:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1, "kx": 1}, "grid": {"dt": 0.1, "steps": 1}})")
            .rfind("rates.kx: unknown key", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": -3}})")
            .rfind("grid.steps:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": 2, "horizon": 1}})")
            .rfind("grid:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": 1},
                         "theories": ["Haberkorn"]})")
            .rfind("theories[0]:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": 1},
                         "system": {"nuclei": [{"spin": 0.7}]}})")
            .rfind("system.nuclei[0].spin:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": 1},
                         "montecarlo": {"n_trajectories": 10, "initial_state": "random"}})")
            .rfind("montecarlo.initial_state:", 0) == 0);
  CHECK(config_error(R"({"rates": {"k_S": 0.1, "k_T": 0.1}, "grid": {"dt": 0.1, "steps": 1}, "extra": 1})")
            .rfind("config.extra: unknown key", 0) == 0);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("semantic validation") {
  ExperimentConfig c = parse_config(kMinimal);
  CHECK_THROWS_WITH_AS(validate(c, true, false), doctest::Contains("theories"), ConfigError);
  c.theories = {TheoryKind::Traditional};
  CHECK_NOTHROW(validate(c, true, false));
  CHECK_THROWS_WITH_AS(validate(c, true, true), doctest::Contains("montecarlo.n_trajectories"),
                       ConfigError);
  c.dt = 0.2;
  CHECK_THROWS_WITH_AS(validate(c, true, false), doctest::Contains("grid.dt"), ConfigError);
  c.dt = 0.01;
  c.rates.k_s = -1;
  CHECK_THROWS_WITH_AS(validate(c, true, false), doctest::Contains("rates.k_S"), ConfigError);
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    ExperimentConfig c = preset(name);
    CAPTURE(name);
    CHECK(c.name == name);
    CHECK_NOTHROW(validate(c, true, true));
    CHECK(c.steps == 10000);
    CHECK(c.horizon() == doctest::Approx(30.0));
    CHECK(same_config(parse_config(to_json(c)), c));
  }
  CHECK(preset("fig3").montecarlo.n_trajectories == 20000);
  CHECK_FALSE(preset("fig3-mc").montecarlo.recombination);
  CHECK(preset("fig6a").rates.k_t == 0.25);
  CHECK(preset("fig6b").rates.k_t == 0.5);
  CHECK(preset("fig5").montecarlo.seed == 1);
  CHECK_THROWS_AS(preset("fig8"), ConfigError);
}

TEST_CASE("shipped preset files match the built-in presets") {
  const std::filesystem::path dir = std::filesystem::path(RPSPIN_SOURCE_DIR) / "presets";
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto path = dir / (name + ".json");
    REQUIRE(std::filesystem::exists(path));
    CHECK(same_config(load_config_file(path.string()), preset(name)));
  }
}

TEST_CASE("experiment setup") {
  ExperimentConfig c = preset("fig5");
  ExperimentSetup s = ExperimentSetup::from(c);
  CHECK(s.system.dimension() == 8);
  CHECK(std::abs(s.ctx.c_max - 0.6122048478110079) < 1e-12);

  c.steps = 200;
  c.montecarlo.steps = 200;
  c.montecarlo.n_trajectories = 300;
  c.montecarlo.threads = 1;
  auto master = run_master_equations(c, s);
  REQUIRE(master.size() == 3);
  auto mc = run_montecarlo(c, s);
  CsvTable e = evolution_table(master[0]);
  CHECK(e.columns.size() == 11);
  CHECK(e.rows.size() == 201);
  CsvTable m = ensemble_table(mc);
  CHECK(m.column("stderr").size() == 201);
  Comparison cmp = compare(master[0], mc, master[0].pcoh);
  CHECK(cmp.points == 201);
  CHECK(cmp.within <= cmp.points);
  CHECK_FALSE(format_comparison(cmp).empty());
}
