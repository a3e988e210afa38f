#pragma once

// Config-driven experiment runner behind the `noonring` executable.
//
// A config is a flat JSON object. Keys are resolved in the order
// schema defaults < config file < --set overrides < --seed flag; unknown
// keys and type mismatches are rejected. Every run writes its CSVs and a
// manifest.json (resolved config plus its hash) atomically at the end.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace noonring::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamSpec {
  std::string key;
  std::string type;  // int, uint, number, bool, string, number|null
  nlohmann::json default_value;
  std::string help;
};

struct ExperimentSpec {
  std::string name;
  std::string summary;
  std::vector<std::string> outputs;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentSpec>& experiments();
const ExperimentSpec& find_experiment(const std::string& name);

/// Human-readable schema dump, stable across runs.
void list_experiments(std::ostream& os);

struct RunRequest {
  std::string experiment;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;  // key=value, value parsed as JSON when possible
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

/// Fully resolved and validated config. Throws ConfigError.
nlohmann::json resolve_config(const RunRequest& req);

/// 16 hex digits of FNV-1a over the canonical dump of `config`.
std::string config_hash(const nlohmann::json& config);

/// Runs the experiment and returns the exit code. Progress goes to `log`;
/// failures are reported on `err` as a one-line JSON error record, which is
/// also written to out_dir/error.json when possible.
int run(const RunRequest& req, std::ostream& log, std::ostream& err);

}  // namespace noonring::cli
