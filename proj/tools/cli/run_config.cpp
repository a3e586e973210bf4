#include "run_config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <type_traits>

#include "slitflow/format.hpp"

namespace slitflow::cli {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  const char* first = s.data() + (s.front() == '+' ? 1 : 0);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a complex number: '" + whole + "'");
  return v;
}

template <class T>
T get_positive(const nlohmann::json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      throw ConfigError(std::string("'") + key + "' must be a positive integer");
    return static_cast<T>(v.get<long long>());
  } else {
    return v.get<T>();
  }
}

double get_number(const nlohmann::json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "ndjson") return OutputFormat::Ndjson;
  if (text == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + text + "' (csv, ndjson, json)");
}

const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Ndjson:
      return "ndjson";
    case OutputFormat::Json:
      return "json";
  }
  return "csv";
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigError("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(s, text)};
  return {parse_real(s.substr(0, split), text), parse_real(s.substr(split), text)};
}

std::string complex_text(cplx z) {
  const std::string im = format_double(z.imag());
  return format_double(z.real()) + (im.front() == '-' ? "" : "+") + im + "i";
}

bool is_stochastic(const std::string& command) {
  return command == "simulate" || command == "verify-martingales" || command == "gff-couple" ||
         command == "cardy-zhan";
}

RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "simulate") {
    c.T = 1.0;
    c.dt = 1e-3;
    c.points = {cplx(0.0, 1.0)};
  } else if (command == "verify-martingales") {
    c.n_paths = 10000;
  } else if (command == "gff-couple") {
    c.dt = 1e-3;
    c.n_paths = 5000;
  } else if (command == "cardy-zhan") {
    c.kappa = 6.0;
    c.dt = 2e-4;
    c.n_paths = 20000;
    c.points = {cplx(0.0, std::numbers::pi / 2)};
  } else if (command == "sc-residual") {
    c.kappa = 6.0;
    c.points = {cplx(0.5, 0.5), cplx(0.0, 2.0)};
  } else if (command == "check-identities") {
    c.n_paths = 1000;
    c.seed = 1;
  }
  return c;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      if (!v.is_string() || v.get<std::string>() != cfg.command)
        throw ConfigError("config file is for command '" + v.dump() + "', not '" + cfg.command + "'");
    } else if (key == "model") {
      if (!v.is_string()) throw ConfigError("'model' must be a string");
      cfg.model = v.get<std::string>();
    } else if (key == "kappa") {
      cfg.kappa = get_number(v, "kappa");
    } else if (key == "alpha") {
      cfg.alpha = get_number(v, "alpha");
    } else if (key == "beta") {
      cfg.beta = get_number(v, "beta");
    } else if (key == "T") {
      cfg.T = get_number(v, "T");
    } else if (key == "dt") {
      cfg.dt = get_number(v, "dt");
    } else if (key == "T_max") {
      cfg.t_max = get_number(v, "T_max");
    } else if (key == "n_paths") {
      cfg.n_paths = get_positive<std::size_t>(v, "n_paths");
    } else if (key == "K") {
      cfg.modes = get_positive<std::size_t>(v, "K");
    } else if (key == "mesh") {
      cfg.mesh = get_positive<int>(v, "mesh");
    } else if (key == "master_seed" || key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("'" + key + "' must be an unsigned 64-bit integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "z") {
      cfg.points.clear();
      const auto one = [&](const nlohmann::json& e) {
        if (e.is_string()) return parse_complex(e.get<std::string>());
        if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
          return cplx(e[0].get<double>(), e[1].get<double>());
        throw ConfigError("'z' entries are strings like \"1+2i\" or [re, im] pairs");
      };
      if (v.is_array() && !(v.size() == 2 && v[0].is_number())) {
        for (const auto& e : v) cfg.points.push_back(one(e));
      } else {
        cfg.points.push_back(one(v));
      }
    } else if (key == "what") {
      if (!v.is_string()) throw ConfigError("'what' must be a string");
      cfg.what = v.get<std::string>();
    } else if (key == "format") {
      if (!v.is_string()) throw ConfigError("'format' must be a string");
      cfg.format = parse_format(v.get<std::string>());
    } else if (key == "out") {
      if (!v.is_string()) throw ConfigError("'out' must be a string");
      cfg.out = v.get<std::string>();
    } else if (key == "threads") {
      cfg.threads = get_positive<unsigned>(v, "threads");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

void validate(const RunConfig& cfg) {
  const auto finite_positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!std::isfinite(cfg.kappa) || !std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta))
    throw ConfigError("model parameters must be finite");
  if (!(cfg.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!finite_positive(cfg.T) || !finite_positive(cfg.dt) || !finite_positive(cfg.t_max))
    throw ConfigError("T, dt and T_max must be positive");
  if (cfg.dt > cfg.T && cfg.command != "cardy-zhan") throw ConfigError("dt must not exceed T");
  if (cfg.model != "chordal" && cfg.model != "dipolar") throw ConfigError("model must be 'chordal' or 'dipolar'");
  if (cfg.what != "flow" && cfg.what != "trace" && cfg.what != "hull")
    throw ConfigError("what must be 'flow', 'trace' or 'hull'");
  if (is_stochastic(cfg.command) && !cfg.seed) throw ConfigError("--seed is required for " + cfg.command);
  if (cfg.modes > static_cast<std::size_t>(cfg.mesh) * static_cast<std::size_t>(cfg.mesh))
    throw ConfigError("K must not exceed mesh²");
  for (cplx z : cfg.points)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("points must be finite");
}

OutputFormat effective_format(const RunConfig& cfg) {
  if (cfg.format) return *cfg.format;
  if (cfg.command == "classify") return OutputFormat::Json;
  if (cfg.command == "simulate" && cfg.what == "flow") return OutputFormat::Ndjson;
  return OutputFormat::Csv;
}

nlohmann::ordered_json header_json(const RunConfig& cfg) {
  nlohmann::ordered_json c;
  c["model"] = cfg.model;
  c["kappa"] = cfg.kappa;
  c["alpha"] = cfg.alpha;
  c["beta"] = cfg.beta;
  c["T"] = cfg.T;
  c["dt"] = cfg.dt;
  c["n_paths"] = cfg.n_paths;
  c["K"] = cfg.modes;
  c["mesh"] = cfg.mesh;
  c["T_max"] = cfg.t_max;
  c["master_seed"] = cfg.seed ? nlohmann::ordered_json(*cfg.seed) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (cplx z : cfg.points) pts.push_back(complex_text(z));
  c["z"] = pts;
  c["what"] = cfg.what;
  c["format"] = to_string(effective_format(cfg));
  nlohmann::ordered_json h;
  h["tool"] = "slitflow";
  h["version"] = SLITFLOW_VERSION;
  h["command"] = cfg.command;
  h["config"] = c;
  return h;
}

}  // namespace slitflow::cli
