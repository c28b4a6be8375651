#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigenflow {

/// Raised for malformed config files, unknown keys, and parameter values the
/// solvers reject. The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat INI-style configuration: [section] headers, key = value lines,
/// comments starting with '#' or ';' (whole-line or trailing). Keys are
/// addressed as "section.key". An empty file is valid and yields defaults.
///
/// Every get_* records the key as touched; untouched_keys() afterwards
/// returns everything the file defined but the scenario never asked for,
/// which the runner treats as a fatal typo.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text);

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  std::vector<std::string> untouched_keys() const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> touched_;
};

/// One named pass/fail measurement from a scenario run.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Outcome of run_scenario. exit_code: 0 all checks passed, 1 some check
/// failed, 2 configuration problem (nothing was solved), 3 solver failure
/// (non-convergence or an internal error mid-run).
struct ScenarioResult {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  std::string message;
};

/// Names accepted by run_scenario, in release order.
const std::vector<std::string>& scenario_names();

/// Semantic version reported by the CLI and stamped into meta.json.
const char* version_string();

/// Runs one named experiment end to end: parses the config (empty path means
/// all defaults), solves, writes artifacts into out_dir (meta.json,
/// report.json, CSV fields and curves), and evaluates the embedded checks.
/// The seed feeds direction sampling and every game stream. levels_override,
/// when positive, sets how many time levels are exported as field CSVs.
///
/// Unknown scenario names return exit code 2 without touching the
/// filesystem. All artifact bytes are deterministic for fixed inputs.
ScenarioResult run_scenario(const std::string& name, const std::string& config_path,
                            const std::string& out_dir, std::uint64_t seed,
                            int levels_override = 0);

}  // namespace eigenflow
