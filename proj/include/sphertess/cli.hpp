#pragma once

// Experiment configuration and execution for the sphertess command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphertess/functionals.hpp"

namespace sphertess::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kDegenerate = 3 };

struct ExperimentConfig {
  std::string command;
  int d = 2;
  std::optional<double> gamma_s;
  std::vector<double> gamma;  // estimate-rate grid
  std::optional<std::string> model;
  SizeSpec size;
  bool size_given = false;
  std::optional<double> a;
  std::optional<double> epsilon;
  std::optional<double> alpha0;
  std::optional<std::string> kind;        // verify-stability
  std::optional<std::string> deviation;   // estimate-conditional
  std::optional<std::string> functional;  // check-typical-identity
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::size_t volume_samples = 20000;
  std::size_t u1_samples = 20000;
  int delta2_grid = 512;
  std::string output;
  nlohmann::json raw;
};

const std::vector<std::string>& subcommands();

/// CSV column lists per subcommand, for --help.
std::string columns_help();

/// Validates every key and range; throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);

struct RunResult {
  int exit_code = kOk;
  nlohmann::json results;
  std::optional<bool> pass;  // set by verify-* and check-* commands
  std::string csv_body;      // header + rows, without the timestamp line
  std::size_t csv_rows = 0;
};

/// Runs the experiment in memory (no files).
RunResult execute(const ExperimentConfig& config);

/// Parses the config file, runs it and writes <prefix>.summary.json and
/// <prefix>.rows.csv. Returns the process exit code.
int run_file(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace sphertess::cli
