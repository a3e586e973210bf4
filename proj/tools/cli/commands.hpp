#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace slitflow::cli {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
};

struct Outcome {
  Table table;
  /// Conjunction of every pass flag the command computed.
  bool pass = true;
  /// Additional top-level members of the JSON rendering.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

/// Runs one validated command.
Outcome run_command(const RunConfig& cfg);

/// Header block followed by the table in the configured format.
std::string render(const RunConfig& cfg, const Outcome& outcome);

/// Parses argv, runs the command and writes the artifact; returns the exit status
/// (0 all checks pass, 1 a check failed or the run aborted, 2 usage error).
int run_main(int argc, char** argv);

}  // namespace slitflow::cli
