#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "eigenflow/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"eigenflow: min-max eigenvalue evolutions, stationary profiles, and game checks"};
  app.set_version_flag("--version", std::string("eigenflow ") + eigenflow::version_string());
  app.require_subcommand(0, 1);

  std::string scenario;
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 1;
  int levels = 0;

  std::string names;
  for (const auto& n : eigenflow::scenario_names()) names += (names.empty() ? "" : ", ") + n;

  CLI::App* run = app.add_subcommand("run", "run a named scenario and write its artifacts");
  run->add_option("scenario", scenario, "one of: " + names)->required();
  run->add_option("--config", config, "INI config file; omitted means scenario defaults");
  run->add_option("--out", out, "output directory")->capture_default_str();
  run->add_option("--seed", seed, "seed for direction sampling and game streams")
      ->capture_default_str();
  run->add_option("--levels", levels, "field levels to export (0 = scenario default)");

  CLI11_PARSE(app, argc, argv);

  if (!run->parsed()) {
    std::printf("%s", app.help().c_str());
    return 0;
  }

  const eigenflow::ScenarioResult res =
      eigenflow::run_scenario(scenario, config, out, seed, levels);
  for (const auto& c : res.checks)
    std::printf("%-28s %s  measured %.6g  threshold %.6g%s%s\n", c.name.c_str(),
                c.passed ? "PASS" : "FAIL", c.measured, c.threshold,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  if (!res.message.empty()) std::fprintf(stderr, "eigenflow: %s\n", res.message.c_str());
  return res.exit_code;
}
