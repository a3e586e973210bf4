#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "slitflow/conformal.hpp"

namespace slitflow::cli {

enum class OutputFormat { Csv, Ndjson, Json };

OutputFormat parse_format(const std::string& text);
const char* to_string(OutputFormat f);

/// Schema or range problem in the run configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model = "chordal";
  double kappa = 4.0;
  double alpha = 0.0;
  double beta = 0.0;
  double T = 0.3;
  double dt = 1e-4;
  std::size_t n_paths = 1;
  std::size_t modes = 64 * 64;
  int mesh = 256;
  double t_max = 200.0;
  std::optional<std::uint64_t> seed;
  std::vector<cplx> points;
  /// simulate: flow, trace or hull.
  std::string what = "flow";
  std::optional<OutputFormat> format;
  std::string out;
  std::optional<unsigned> threads;
};

/// Parses "a+bi", "bi", "a", "-a-bi"; whitespace is ignored.
cplx parse_complex(const std::string& text);
std::string complex_text(cplx z);

bool is_stochastic(const std::string& command);

/// Command-specific defaults for a fresh config.
RunConfig defaults_for(const std::string& command);

/// Overlays the keys of a JSON config object; unknown keys are rejected.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

/// Positivity of numeric controls and the seed requirement.
void validate(const RunConfig& cfg);

OutputFormat effective_format(const RunConfig& cfg);

/// Config echo for output headers. Thread count and output path are left out,
/// so reruns differing only in those produce identical bytes.
nlohmann::ordered_json header_json(const RunConfig& cfg);

}  // namespace slitflow::cli
