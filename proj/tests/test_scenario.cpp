#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "eigenflow/scenario.hpp"

using namespace eigenflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

fs::path fresh_dir(const std::string& name) {
  fs::create_directories("scenario_scratch");
  const fs::path p = fs::path("scenario_scratch") / name;
  fs::remove_all(p);
  return p;
}

const char* kTinyHeatConfig =
    "# quick settings for tests\n"
    "[solver]\n"
    "epsilon = 0.05\n"
    "h = 0.025         ; lattice step\n"
    "horizon = 0.8\n"
    "resolution = 16\n";

}  // namespace

TEST_CASE("config files parse sections, comments, and typed reads") {
  const ConfigFile cfg = ConfigFile::parse_text(
      "# leading comment\n"
      "[solver]\n"
      "epsilon = 0.25   # trailing comment\n"
      "sweeps = 12\n"
      "[data]\n"
      "label = plain text ; another comment\n"
      "big = 18446744073709551615\n");
  CHECK(cfg.get_double("solver.epsilon", 0.0) == doctest::Approx(0.25));
  CHECK(cfg.get_int("solver.sweeps", 0) == 12);
  CHECK(cfg.get_string("data.label", "") == "plain text");
  CHECK(cfg.get_u64("data.big", 0) == 18446744073709551615ULL);
  CHECK(cfg.get_double("solver.missing", 7.5) == doctest::Approx(7.5));
  CHECK(cfg.has("solver.epsilon"));
  CHECK_FALSE(cfg.has("solver.missing"));
  CHECK(cfg.untouched_keys().empty());
}

TEST_CASE("untouched keys are reported for typo detection") {
  const ConfigFile cfg = ConfigFile::parse_text("[solver]\nepsilon = 0.1\nepsilonn = 0.2\n");
  cfg.get_double("solver.epsilon", 0.0);
  const auto leftover = cfg.untouched_keys();
  REQUIRE(leftover.size() == 1);
  CHECK(leftover[0] == "solver.epsilonn");
}

TEST_CASE("malformed config lines are rejected") {
  CHECK_THROWS_AS(ConfigFile::parse_text("key_without_section = 1\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_text("[s]\nnovalue\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_text("[s]\na = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_text("[s]\na = notanumber\n").get_double("s.a", 0.0),
                  ConfigError);
  CHECK_NOTHROW(ConfigFile::parse_text(""));
  CHECK_NOTHROW(ConfigFile::parse_text("  \n# only a comment\n"));
}

TEST_CASE("the scenario table is fixed") {
  const auto& names = scenario_names();
  REQUIRE(names.size() == 8);
  CHECK(names[0] == "heat1d");
  CHECK(std::string(version_string()).find('.') != std::string::npos);
}

TEST_CASE("unknown scenarios fail fast without touching the filesystem") {
  const fs::path out = fresh_dir("unknown");
  const ScenarioResult res = run_scenario("definitely-not-a-scenario", "", out.string(), 1);
  CHECK(res.exit_code == 2);
  CHECK(res.message.find("definitely-not-a-scenario") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown config keys abort with the key named") {
  const fs::path out = fresh_dir("typo");
  const fs::path cfg_path = out.string() + "_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << "[solver]\nepsilon = 0.1\nh = 0.05\nhorzion = 0.6\n";
  }
  const ScenarioResult res = run_scenario("heat1d", cfg_path.string(), out.string(), 1);
  CHECK(res.exit_code == 2);
  CHECK(res.message.find("horzion") != std::string::npos);
  fs::remove(cfg_path);
}

TEST_CASE("invalid solver values surface as configuration errors") {
  const fs::path out = fresh_dir("badsolver");
  const fs::path cfg_path = out.string() + "_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << "[solver]\nepsilon = 0.1\nh = 0.2\n";  // h > epsilon
  }
  const ScenarioResult res = run_scenario("heat1d", cfg_path.string(), out.string(), 1);
  CHECK(res.exit_code == 2);
  CHECK(res.message.find("solver.h") != std::string::npos);
  fs::remove(cfg_path);
}

TEST_CASE("heat scenario passes with reduced settings and writes its artifacts") {
  const fs::path out = fresh_dir("heat_small");
  const fs::path cfg_path = out.string() + "_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << kTinyHeatConfig;
  }
  const ScenarioResult res = run_scenario("heat1d", cfg_path.string(), out.string(), 1);
  CHECK(res.exit_code == 0);
  REQUIRE(res.checks.size() >= 4);
  for (const auto& c : res.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
  CHECK(fs::exists(out / "meta.json"));
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "decay.csv"));
  const std::string meta = slurp(out / "meta.json");
  CHECK(meta.find("\"scenario\"") != std::string::npos);
  CHECK(meta.find("heat1d") != std::string::npos);
  const std::string report = slurp(out / "report.json");
  CHECK(report.find("\"passed\"") != std::string::npos);
  fs::remove(cfg_path);
}

TEST_CASE("reruns are byte identical") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const fs::path cfg_path = fs::path("scenario_scratch") / "det_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << kTinyHeatConfig;
  }
  const ScenarioResult ra = run_scenario("heat1d", cfg_path.string(), a.string(), 7);
  const ScenarioResult rb = run_scenario("heat1d", cfg_path.string(), b.string(), 7);
  CHECK(ra.exit_code == 0);
  CHECK(rb.exit_code == 0);
  const auto fa = dir_bytes(a);
  const auto fb = dir_bytes(b);
  REQUIRE(fa.size() == fb.size());
  REQUIRE(fa.size() >= 4);
  for (const auto& [name, bytes] : fa) {
    CAPTURE(name);
    REQUIRE(fb.count(name) == 1);
    CHECK(bytes == fb.at(name));
  }
}

TEST_CASE("level export honours the override") {
  const fs::path out = fresh_dir("levels");
  const fs::path cfg_path = fs::path("scenario_scratch") / "levels_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << kTinyHeatConfig;
  }
  const ScenarioResult res = run_scenario("heat1d", cfg_path.string(), out.string(), 1, 5);
  CHECK(res.exit_code == 0);
  int fields = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    const std::string n = e.path().filename().string();
    if (n.rfind("field_", 0) == 0) ++fields;
  }
  CHECK(fields == 5);
}

TEST_CASE("field csv values survive a text round trip") {
  const fs::path out = fresh_dir("roundtrip");
  const fs::path cfg_path = fs::path("scenario_scratch") / "rt_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << kTinyHeatConfig;
  }
  REQUIRE(run_scenario("heat1d", cfg_path.string(), out.string(), 1).exit_code == 0);
  std::ifstream in(out / "decay.csv");
  std::string header, line;
  REQUIRE(std::getline(in, header));
  int rows = 0;
  while (std::getline(in, line) && rows < 50) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    // 17 significant digits print/parse exactly
    const double v = std::stod(line.substr(comma + 1));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    CHECK(line.substr(comma + 1) == buf);
    ++rows;
  }
  CHECK(rows > 10);
}
