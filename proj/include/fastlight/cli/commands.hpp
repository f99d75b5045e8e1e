#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fastlight/cli/config.hpp"
#include "fastlight/cli/csv.hpp"
#include "fastlight/errors.hpp"
#include "fastlight/experiments.hpp"

namespace fastlight::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

const std::vector<std::string>& command_names();

struct CriterionResult {
  std::string name;
  double value = 0.0;
  double lower = 0.0;  // inclusive bounds on value
  double upper = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string command;
  RunConfig config;
  std::optional<Calibration> calibration;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<CriterionResult> criteria;

  nlohmann::ordered_json to_json() const;
};

struct CommandOutput {
  RunReport report;
  Table table;
};

/// Runs one command without touching the filesystem.
CommandOutput execute_command(std::string_view name, const RunConfig& config);

/// Runs the command and writes <out_dir>/<name>.csv and <out_dir>/<name>.json.
RunReport run_command(std::string_view name, const RunConfig& config,
                      const std::filesystem::path& out_dir);

/// 2 for configuration problems, 3 for numerical failures, 4 for I/O.
int exit_code_for(ErrorKind kind);

}  // namespace fastlight::cli
