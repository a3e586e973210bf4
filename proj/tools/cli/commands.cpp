#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "slitflow/classifier.hpp"
#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/format.hpp"
#include "slitflow/gff.hpp"
#include "slitflow/observables.hpp"
#include "slitflow/parallel.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::cli {

namespace {

using nlohmann::ordered_json;
using Row = std::vector<ordered_json>;

classify::FlowModel model_of(const RunConfig& cfg) {
  return cfg.model == "dipolar" ? classify::dipolar_model(cfg.kappa, cfg.alpha)
                                : classify::chordal_model(cfg.kappa, cfg.alpha);
}

unsigned threads_of(const RunConfig& cfg) { return resolve_threads(cfg.threads); }

/// Points in the box [-2, 2] × [0.2, 2.2] drawn from `seed`, pairwise ≥ 0.05 apart.
std::vector<std::pair<cplx, cplx>> random_pairs(std::uint64_t seed, std::size_t n) {
  rng::Engine eng(rng::stream_seed(seed, 21));
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(n);
  while (out.size() < n) {
    const cplx z1(4.0 * rng::uniform01(eng) - 2.0, 0.2 + 2.0 * rng::uniform01(eng));
    const cplx z2(4.0 * rng::uniform01(eng) - 2.0, 0.2 + 2.0 * rng::uniform01(eng));
    if (std::abs(z1 - z2) > 0.05) out.emplace_back(z1, z2);
  }
  return out;
}

Outcome classify_cmd(const RunConfig& cfg) {
  Outcome o;
  o.table.columns = {"family", "label", "parameter", "degenerate", "b_m1",    "b_0",
                     "b_1",    "sigma_0", "sigma_1", "sigma_class", "system_residual", "pass"};
  for (const auto& spec : classify::enumerate_families(cfg.kappa)) {
    const std::vector<double> extra(spec.extra.size(), 0.0);
    const double param = spec.parameter == "beta" ? cfg.beta : cfg.alpha;
    const classify::FlowModel m = spec.instantiate(cfg.kappa, param, extra);
    const std::array<double, 3> b{m.b.bm1(), m.b.b0(), m.b.b1()};
    const auto sys = classify::build_system<double>(cfg.kappa, m.sigma.s0(), m.sigma.s1(), m.alpha,
                                                    m.beta * std::sqrt(cfg.kappa));
    double residual = 0.0;
    for (double r : classify::system_residuals(sys, b)) residual = std::max(residual, std::abs(r));
    const classify::SystemSolution sol = classify::solve_system(cfg.kappa, m.sigma.s0(), m.sigma.s1(), m.alpha, m.beta);
    if (sol.status == classify::SolveStatus::Unique)
      for (int k = 0; k < 3; ++k) residual = std::max(residual, std::abs(sol.b[k] - b[k]));
    const bool pass = residual < 1e-12 && sol.status != classify::SolveStatus::Inconsistent;
    o.pass = o.pass && pass;
    o.table.rows.push_back({classify::to_string(spec.kind), spec.label, spec.parameter, spec.degenerate, b[0], b[1],
                            b[2], m.sigma.s0(), m.sigma.s1(), fields::to_string(fields::sigma_classify(m.sigma).tag),
                            residual, pass});
  }
  o.extra["families"] = ordered_json::parse(classify::family_catalogue_json(cfg.kappa, cfg.alpha, cfg.beta));
  return o;
}

Outcome check_identities_cmd(const RunConfig& cfg) {
  Outcome o;
  o.table.columns = {"check", "family", "value", "tolerance", "samples", "pass"};
  const auto pairs = random_pairs(*cfg.seed, cfg.n_paths);
  std::vector<cplx> singles;
  for (std::size_t k = 0; k < std::min<std::size_t>(100, pairs.size()); ++k) singles.push_back(pairs[k].first);
  const std::size_t fd_count = std::min<std::size_t>(50, pairs.size());

  auto add = [&](const std::string& check, const std::string& family, double value, double tol, std::size_t n) {
    const bool pass = value < tol;
    o.pass = o.pass && pass;
    o.table.rows.push_back({check, family, value, tol, n, pass});
  };

  for (const auto& spec : classify::enumerate_families(cfg.kappa)) {
    const std::vector<double> extra(spec.extra.size(), 0.0);
    const double param = spec.parameter == "beta" ? cfg.beta : cfg.alpha;
    const classify::FlowModel m = spec.instantiate(cfg.kappa, param, extra);
    const std::string name = spec.label;

    double sig = 0.0, bdev = 0.0, fd = 0.0;
    for (const auto& [z1, z2] : pairs) {
      sig = std::max(sig, std::abs(fields::lie_green_closed(m.sigma, z1, z2)));
      const double expected = 4.0 * (1.0 / z1).imag() * (1.0 / z2).imag();
      bdev = std::max(bdev, std::abs(fields::lie_green_closed(m.b, z1, z2) - expected));
    }
    const fields::ScalarField green = [](std::span<const cplx> z) {
      return cplx(conformal::green_half_plane_raw(z[0], z[1]), 0.0);
    };
    const fields::ConformalWeight scalar[2] = {fields::ConformalWeight::differential(0.0, 0.0),
                                               fields::ConformalWeight::differential(0.0, 0.0)};
    for (const auto& field : {m.b, m.sigma}) {
      const fields::VectorField v = fields::VectorField::from(field);
      for (std::size_t k = 0; k < fd_count; ++k) {
        const cplx nodes[2] = {pairs[k].first, pairs[k].second};
        const cplx num = fields::lie_derivative(v, green, scalar, nodes);
        fd = std::max(fd, std::abs(num - fields::lie_green_closed(field, nodes[0], nodes[1])));
      }
    }
    add("lie_green_sigma", name, sig, 1e-12, pairs.size());
    add("lie_green_b_minus_4ImIm", name, bdev, 1e-10, pairs.size());
    add("lie_green_finite_difference", name, fd, 1e-6, 2 * fd_count);

    const classify::HarmonicU u = classify::build_u(m);
    add("generator_annihilation", name, classify::check_annihilation(m, u, singles).max, 1e-8, singles.size());
    add("b_sigma_relation", name, classify::check_bsigma(m, singles).max, 1e-10, singles.size());
  }
  return o;
}

Outcome simulate_cmd(const RunConfig& cfg) {
  Outcome o;
  const classify::FlowModel model = model_of(cfg);
  const std::size_t npts = cfg.points.size();
  std::vector<std::vector<Row>> per_path(cfg.n_paths);
  std::vector<cplx> grid;
  if (cfg.what == "hull") {
    for (int j = 1; j <= 25; ++j)
      for (int i = 0; i <= 40; ++i) grid.emplace_back(-2.0 + 0.1 * i, 0.1 * j);
  }
  if (cfg.what == "trace" && cfg.model != "chordal") throw ConfigError("trace is available for the chordal model only");

  parallel_for(cfg.n_paths, threads_of(cfg), [&](std::size_t p) {
    const flow::DrivingPath d = flow::sample_driving(cfg.kappa, cfg.alpha, cfg.T, cfg.dt, rng::path_seed(*cfg.seed, p));
    auto& rows = per_path[p];
    if (cfg.what == "flow") {
      flow::FlowOptions opt;
      opt.record_stride = std::max<std::size_t>(1, d.steps() / 500);
      for (std::size_t j = 0; j < npts; ++j) {
        const flow::FlowPath path = flow::integrate_slit_flow(model, cfg.points[j], d, opt);
        for (std::size_t k = 0; k < path.t.size(); ++k) {
          rows.push_back({p * npts + j, path.t[k], path.w[k].real(), path.w[k].imag(), path.log_wp[k].real(),
                          path.log_wp[k].imag(), path.swallowed && path.t[k] >= path.tau});
        }
      }
    } else if (cfg.what == "trace") {
      std::vector<double> times;
      for (int k = 0; k <= 100; ++k) times.push_back(cfg.T * k / 100.0);
      const std::vector<cplx> gamma = flow::trace_points(d, times);
      for (std::size_t k = 0; k < times.size(); ++k) rows.push_back({p, times[k], gamma[k].real(), gamma[k].imag()});
    } else {
      const flow::HullSample hull = flow::hull_scan(model, d, grid, cfg.T);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        rows.push_back({p, hull.points[k].real(), hull.points[k].imag(), hull.swallowed[k] != 0,
                        std::isfinite(hull.tau[k]) ? ordered_json(hull.tau[k]) : ordered_json(nullptr)});
      }
    }
  });
  if (cfg.what == "flow")
    o.table.columns = {"path_id", "t", "re_w", "im_w", "re_logwp", "im_logwp", "swallowed"};
  else if (cfg.what == "trace")
    o.table.columns = {"path_id", "t", "re_gamma", "im_gamma"};
  else
    o.table.columns = {"path_id", "re_z", "im_z", "swallowed", "tau"};
  for (auto& rows : per_path)
    for (auto& r : rows) o.table.rows.push_back(std::move(r));
  return o;
}

Outcome verify_martingales_cmd(const RunConfig& cfg) {
  Outcome o;
  const classify::FlowModel model = model_of(cfg);
  std::vector<cplx> points = cfg.points;
  if (points.empty()) {
    points = cfg.model == "dipolar" ? std::vector<cplx>{{0.0, 2.0}, {1.0, 1.5}, {-1.5, 2.5}}
                                    : std::vector<cplx>{{0.0, 2.0}, {1.5, 2.0}, {-1.0, 2.5}};
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 1; k < std::min<std::size_t>(points.size(), 3); ++k) pairs.emplace_back(0, k);
  obs::SuiteConfig sc;
  sc.T = cfg.T;
  sc.dt = cfg.dt;
  sc.n_paths = cfg.n_paths;
  sc.seed = *cfg.seed;
  sc.threads = threads_of(cfg);
  const obs::SuiteResult res = obs::martingale_suite(model, points, pairs, sc);
  o.table.columns = {"name", "kappa", "alpha", "n", "mean", "se", "target", "zscore", "pass"};
  for (const auto& r : res.reports)
    o.table.rows.push_back({r.name, r.kappa, r.alpha, r.n, r.mean, r.se, r.target, r.zscore, r.pass});
  o.pass = res.all_pass();
  o.extra["swallowed_paths"] = res.swallowed;
  return o;
}

Outcome gff_couple_cmd(const RunConfig& cfg) {
  Outcome o;
  const classify::FlowModel model = model_of(cfg);
  obs::CouplingExperimentConfig cc;
  cc.domain.modes = cfg.modes;
  cc.domain.mesh = cfg.mesh;
  if (!cfg.points.empty()) cc.bump.center = cfg.points.front();
  cc.n_samples = cfg.n_paths;
  cc.seed = *cfg.seed;
  cc.threads = threads_of(cfg);
  cc.coupling.T = cfg.T;
  cc.coupling.dt = cfg.dt;
  const obs::CouplingResult r = obs::coupling_experiment(model, cc);
  const std::size_t n = r.samples.size();
  const double var_se = n > 1 ? r.variance * std::sqrt(2.0 / static_cast<double>(n - 1)) : 0.0;
  o.table.columns = {"stat", "value", "se", "n"};
  o.table.rows = {
      {"mean", r.mean_report.mean, r.mean_report.se, n},
      {"target_mean", r.mean_report.target, 0.0, n},
      {"mean_zscore", r.mean_report.zscore, 0.0, n},
      {"variance", r.variance, var_se, n},
      {"target_variance", r.target_variance, 0.0, n},
      {"spectral_variance", r.spectral_variance, 0.0, n},
      {"variance_rel_error", r.variance_rel, 0.0, n},
      {"ks_statistic", r.ks, 0.0, n},
      {"ks_critical_1pct", r.ks_critical, 0.0, n},
      {"collisions", static_cast<double>(r.collisions), 0.0, cc.n_samples},
      {"pass", r.pass() ? 1.0 : 0.0, 0.0, n},
  };
  o.pass = r.pass();
  return o;
}

Outcome cardy_zhan_cmd(const RunConfig& cfg) {
  Outcome o;
  obs::CardyZhanConfig cz;
  cz.n_paths = cfg.n_paths;
  cz.T_max = cfg.t_max;
  cz.dt = cfg.dt;
  cz.seed = *cfg.seed;
  cz.threads = threads_of(cfg);
  o.table.columns = {"re_z", "im_z", "a_mc", "b_mc", "c_mc", "a_sc", "b_sc", "c_sc", "se", "ambiguous_frac", "pass"};
  for (cplx z : cfg.points) {
    const obs::CardyZhanResult r = obs::cardy_zhan(cfg.kappa, cfg.alpha, z, cz);
    const double se = std::max({r.a.se, r.b.se, r.c.se});
    o.table.rows.push_back({z.real(), z.imag(), r.a.mean, r.b.mean, r.c.mean, r.oracle.a, r.oracle.b, r.oracle.c, se,
                            r.ambiguous_frac, r.pass()});
    o.pass = o.pass && r.pass();
  }
  return o;
}

Outcome sc_residual_cmd(const RunConfig& cfg) {
  Outcome o;
  o.table.columns = {"re_z", "im_z", "sc_residual", "remark_residual", "pass"};
  for (cplx z : cfg.points) {
    const obs::ScResidual r = obs::bpz_sc_residual(cfg.kappa, cfg.alpha, z);
    const bool pass = r.sc < 1e-8 && r.remark < 1e-8;
    o.table.rows.push_back({z.real(), z.imag(), r.sc, r.remark, pass});
    o.pass = o.pass && pass;
  }
  return o;
}

std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number()) return v.dump();
  const std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

bool input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::BoundaryInput:
    case ErrorCode::ParameterRange:
    case ErrorCode::BranchPoint:
    case ErrorCode::CoincidentPoints:
    case ErrorCode::Neutrality:
    case ErrorCode::Config:
      return true;
    default:
      return false;
  }
}

}  // namespace

Outcome run_command(const RunConfig& cfg) {
  if (cfg.command == "classify") return classify_cmd(cfg);
  if (cfg.command == "check-identities") return check_identities_cmd(cfg);
  if (cfg.command == "simulate") return simulate_cmd(cfg);
  if (cfg.command == "verify-martingales") return verify_martingales_cmd(cfg);
  if (cfg.command == "gff-couple") return gff_couple_cmd(cfg);
  if (cfg.command == "cardy-zhan") return cardy_zhan_cmd(cfg);
  if (cfg.command == "sc-residual") return sc_residual_cmd(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

std::string render(const RunConfig& cfg, const Outcome& outcome) {
  const ordered_json header = header_json(cfg);
  std::string out;
  switch (effective_format(cfg)) {
    case OutputFormat::Csv: {
      out += "# slitflow " + std::string(SLITFLOW_VERSION) + " " + cfg.command + "\n";
      out += "# config: " + header["config"].dump() + "\n";
      out += "# pass: " + std::string(outcome.pass ? "true" : "false") + "\n";
      for (std::size_t k = 0; k < outcome.table.columns.size(); ++k)
        out += (k ? "," : "") + outcome.table.columns[k];
      out += "\n";
      for (const auto& row : outcome.table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + csv_cell(row[k]);
        out += "\n";
      }
      break;
    }
    case OutputFormat::Ndjson: {
      ordered_json h;
      h["header"] = header;
      h["pass"] = outcome.pass;
      out += h.dump() + "\n";
      for (const auto& row : outcome.table.rows) {
        ordered_json rec;
        for (std::size_t k = 0; k < row.size(); ++k) rec[outcome.table.columns[k]] = row[k];
        out += rec.dump() + "\n";
      }
      break;
    }
    case OutputFormat::Json: {
      ordered_json doc;
      doc["header"] = header;
      doc["pass"] = outcome.pass;
      for (const auto& [k, v] : outcome.extra.items()) doc[k] = v;
      ordered_json rows = ordered_json::array();
      for (const auto& row : outcome.table.rows) {
        ordered_json rec;
        for (std::size_t k = 0; k < row.size(); ++k) rec[outcome.table.columns[k]] = row[k];
        rows.push_back(rec);
      }
      doc["rows"] = rows;
      out += doc.dump(2) + "\n";
      break;
    }
  }
  return out;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Slit holomorphic stochastic flows: classification, simulation and verification", "slitflow"};
  app.set_version_flag("--version", std::string(SLITFLOW_VERSION));
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, format, model, what;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double kappa = 0, alpha = 0, beta = 0, T = 0, dt = 0, t_max = 0;
    std::size_t n = 0, modes = 0;
    int mesh = 0;
    std::vector<std::string> z;
    bool json = false;
  } f;

  const std::pair<const char*, const char*> commands[] = {
      {"classify", "Catalogue of the coupled families at one kappa"},
      {"check-identities", "Hadamard, generator-annihilation and b-sigma residuals"},
      {"simulate", "Flow, trace or hull dumps for sampled driving paths"},
      {"verify-martingales", "Drift tests for u_t, M_t and the vertex observable"},
      {"gff-couple", "Terminal law of the flow/field coupling"},
      {"cardy-zhan", "Hitting-probability table against the Schwarz-Christoffel oracle"},
      {"sc-residual", "Schwarz-Christoffel and vertex-observable ODE residuals"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", f.config, "JSON config file; flags override its keys");
    sub->add_option("--seed", f.seed, "Master seed (unsigned 64-bit)");
    sub->add_option("--threads", f.threads, "Worker count; results do not depend on it")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "Output path (default: standard output)");
    sub->add_option("--format", f.format, "csv, ndjson or json");
    sub->add_flag("--json", f.json, "Shorthand for --format json");
    sub->add_option("--model", f.model, "chordal or dipolar");
    sub->add_option("--kappa", f.kappa, "SLE parameter kappa");
    sub->add_option("--alpha", f.alpha, "Drift parameter alpha");
    sub->add_option("--beta", f.beta, "Parameter of the beta families");
    sub->add_option("--T", f.T, "Time horizon");
    sub->add_option("--dt", f.dt, "Grid step");
    sub->add_option("--T-max", f.t_max, "Strip horizon for endpoint classification");
    sub->add_option("--n", f.n, "Paths, samples or random pairs");
    sub->add_option("--K", f.modes, "Retained field modes");
    sub->add_option("--mesh", f.mesh, "Mesh cells per side");
    sub->add_option("--z", f.z, "Points such as 1+2i; repeat or separate with commas (use --z=-1+i for a leading minus)");
    sub->add_option("--what", f.what, "simulate: flow, trace or hull");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    RunConfig cfg = defaults_for(sub->get_name());
    if (sub->count("--config")) apply_json(cfg, read_json_file(f.config));
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (sub->count("--threads")) cfg.threads = f.threads;
    if (sub->count("--out")) cfg.out = f.out;
    if (sub->count("--format")) cfg.format = parse_format(f.format);
    if (f.json) cfg.format = OutputFormat::Json;
    if (sub->count("--model")) cfg.model = f.model;
    if (sub->count("--kappa")) cfg.kappa = f.kappa;
    if (sub->count("--alpha")) cfg.alpha = f.alpha;
    if (sub->count("--beta")) cfg.beta = f.beta;
    if (sub->count("--T")) cfg.T = f.T;
    if (sub->count("--dt")) cfg.dt = f.dt;
    if (sub->count("--T-max")) cfg.t_max = f.t_max;
    if (sub->count("--n")) cfg.n_paths = f.n;
    if (sub->count("--K")) cfg.modes = f.modes;
    if (sub->count("--mesh")) cfg.mesh = f.mesh;
    if (sub->count("--what")) cfg.what = f.what;
    if (sub->count("--z")) {
      cfg.points.clear();
      for (const std::string& item : f.z) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ','))
          if (!part.empty()) cfg.points.push_back(parse_complex(part));
      }
    }
    if (cfg.n_paths == 0 || cfg.modes == 0 || cfg.mesh <= 0) throw ConfigError("counts must be positive");
    validate(cfg);

    const Outcome outcome = run_command(cfg);
    const std::string text = render(cfg, outcome);
    if (cfg.out.empty()) {
      std::cout << text << std::flush;
    } else {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!os) throw ConfigError("cannot write '" + cfg.out + "'");
      os << text;
    }
    std::cerr << "slitflow " << cfg.command << ": " << (outcome.pass ? "pass" : "FAIL") << "\n";
    return outcome.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "slitflow: config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "slitflow: " << e.what() << "\n";
    return input_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "slitflow: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace slitflow::cli
