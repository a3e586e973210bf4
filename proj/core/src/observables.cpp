#include "slitflow/observables.hpp"

#include <algorithm>
#include <cmath>

#include "slitflow/error.hpp"
#include "slitflow/format.hpp"
#include "slitflow/parallel.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::obs {

using classify::Family;

UProcess u_process(const flow::FlowPath& path, const HarmonicU& u, double bg) {
  UProcess out;
  out.t = path.t;
  out.u.resize(path.t.size());
  for (std::size_t k = 0; k < path.t.size(); ++k) out.u[k] = u_value(u, bg, path.w[k], path.log_wp[k]);
  out.tau = path.tau;
  out.swallowed = path.swallowed;
  return out;
}

std::vector<double> pair_martingale(const flow::FlowPath& p1, const flow::FlowPath& p2, const HarmonicU& u,
                                    double bg) {
  const std::size_t n = std::min(p1.t.size(), p2.t.size());
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (p1.t[k] != p2.t[k]) throw Error(ErrorCode::ParameterRange, "flow paths sampled on different grids");
    m[k] = u_value(u, bg, p1.w[k], p1.log_wp[k]) * u_value(u, bg, p2.w[k], p2.log_wp[k]) +
           2.0 * conformal::green_half_plane(conformal::HalfPlanePoint(p1.w[k]), conformal::HalfPlanePoint(p2.w[k]));
  }
  return m;
}

stats::McReport drift_test(const std::string& name, const stats::RunningStats& acc, double threshold) {
  if (acc.count() < 2) throw Error(ErrorCode::ParameterRange, "drift test needs at least two samples");
  stats::McReport r = stats::make_report(name, acc, 0.0, threshold);
  if (acc.count() < 100) r.note += (r.note.empty() ? "" : "; ") + std::string("fewer than 100 paths");
  return r;
}

stats::McReport drift_test(const std::string& name, std::span<const double> increments, double threshold) {
  stats::RunningStats acc;
  for (double x : increments) acc.add(x);
  return drift_test(name, acc, threshold);
}

// ---- vertex observables ---------------------------------------------------------

void ChargeVector::require_neutral(double tol) const {
  if (std::abs(total()) > tol) throw Error(ErrorCode::Neutrality, "charges violate neutrality");
}

double ChargeVector::lambda_pm(int sign) const {
  const double t = sign > 0 ? tau_plus : tau_minus;
  return 0.5 * t * t;
}

double ChargeVector::lambda_hat_pm(int sign, double a) const {
  const double t = sign > 0 ? tau_plus : tau_minus;
  return 0.5 * (t * t - (a + sign * delta) * t);
}

double ChargeVector::nu(int sign, double bg) const { return tau * (bg + (sign > 0 ? tau_plus : tau_minus)); }

double ChargeVector::nu_star(int sign, double bg) const {
  return tau_star * (bg + (sign > 0 ? tau_plus : tau_minus));
}

double ChargeVector::nu_hat(int sign, double bg, double a) const {
  return tau * (bg - 0.5 * (a + sign * delta) + (sign > 0 ? tau_plus : tau_minus));
}

double ChargeVector::nu_hat_star(int sign, double bg, double a) const {
  return tau_star * (bg - 0.5 * (a + sign * delta) + (sign > 0 ? tau_plus : tau_minus));
}

namespace {

void require_off_branch(cplx z, bool include_minus_one) {
  if (!(z.imag() > 0.0)) throw Error(ErrorCode::BoundaryInput, "point must lie in the upper half-plane");
  const double tol = 1e-8;
  if (std::abs(z) < tol || std::abs(z - 1.0) < tol || (include_minus_one && std::abs(z + 1.0) < tol))
    throw Error(ErrorCode::BranchPoint, "point too close to a branch point");
}

cplx cpow_log(cplx base, double e) { return e * std::log(base); }

}  // namespace

cplx vertex_correlation(const ChargeVector& q, double bg, double a, cplx z, VertexVariant variant) {
  q.require_neutral();
  require_off_branch(z, true);
  const cplx zb = std::conj(z);
  const bool hat = variant == VertexVariant::Inserted;
  const double np = hat ? q.nu_hat(+1, bg, a) : q.nu(+1, bg);
  const double nm = hat ? q.nu_hat(-1, bg, a) : q.nu(-1, bg);
  const double nsp = hat ? q.nu_hat_star(+1, bg, a) : q.nu_star(+1, bg);
  const double nsm = hat ? q.nu_hat_star(-1, bg, a) : q.nu_star(-1, bg);
  cplx lg = cpow_log(1.0 - z, np) + cpow_log(1.0 + z, nm) + cpow_log(1.0 - zb, nsp) + cpow_log(1.0 + zb, nsm);
  if (q.tau * q.tau_star != 0.0) lg += cpow_log(z - zb, q.tau * q.tau_star);
  if (hat) {
    if (q.tau != 0.0) lg += cpow_log(z, q.tau * a);
    if (q.tau_star != 0.0) lg += cpow_log(zb, q.tau_star * a);
  }
  return std::exp(lg);
}

ChargeVector cardy_zhan_charges(double kappa, double alpha) {
  const auto cft = classify::CftParams::from_kappa(kappa);
  const double a = cft.a;
  const double delta = alpha * a;
  return ChargeVector{-2.0 * a, 0.0, a - delta, a + delta, delta};
}

namespace {

/// log of the observable without the w' factor.
cplx vertex_log_core(const FlowModel& model, cplx w) {
  const double k = model.kappa;
  switch (model.family) {
    case Family::ChordalDrift:
      return -4.0 / k * std::log(w) + 2.0 * model.alpha * w / k;
    case Family::DipolarDrift: {
      const cplx W = 0.5 * w;
      const double e_plus = -1.0 + 2.0 * (1.0 - model.alpha) / k;
      const double e_minus = -1.0 + 2.0 * (1.0 + model.alpha) / k;
      return e_plus * std::log(1.0 - W) + e_minus * std::log(1.0 + W) - 4.0 / k * std::log(W);
    }
    default:
      throw Error(ErrorCode::ParameterRange, "vertex observable defined for chordal and dipolar flows only");
  }
}

}  // namespace

cplx vertex_observable(const FlowModel& model, cplx w, cplx log_wp) {
  return std::exp(vertex_log_core(model, w) + log_wp);
}

cplx vertex_generator_residual(const FlowModel& model, cplx w) {
  const double k = model.kappa;
  const double h = 1e-4 * std::max(1.0, std::abs(w));
  const cplx f0 = std::exp(vertex_log_core(model, w));
  const cplx fp = std::exp(vertex_log_core(model, w + h));
  const cplx fm = std::exp(vertex_log_core(model, w - h));
  const cplx d1 = (fp - fm) / (2.0 * h) / f0;
  const cplx d2 = (fp - 2.0 * f0 + fm) / (h * h) / f0;
  const cplx b = model.b.eval(w), bp = model.b.prime(w);
  const cplx s = model.sigma.eval(w), sp = model.sigma.prime(w), spp = model.sigma.second(w);
  const cplx drift_w = -b + 0.5 * k * s * sp;
  const cplx drift_l = -bp + 0.5 * k * s * spp;
  return drift_w * d1 + drift_l + 0.5 * k * (s * s * d2 + 2.0 * s * sp * d1 + sp * sp);
}

namespace {

/// f'(z) and f''(z) by the trapezoid rule on a circle of radius r.
std::pair<cplx, cplx> cauchy_derivatives(const std::function<cplx(cplx)>& f, cplx z, double r, int n = 64) {
  cplx d1 = 0.0, d2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx e = std::polar(1.0, 2.0 * M_PI * j / n);
    const cplx v = f(z + r * e);
    d1 += v / e;
    d2 += v / (e * e);
  }
  return {d1 / (n * r), 2.0 * d2 / (n * r * r)};
}

}  // namespace

ScResidual bpz_sc_residual(double kappa, double alpha, cplx z) {
  require_off_branch(z, true);
  const conformal::ScMap sc = conformal::sc_map_build(kappa, alpha);
  ScResidual out;
  {
    const double r = 0.4 * std::min({z.imag(), std::abs(z), std::abs(z - 1.0)});
    const auto [d1, d2] = cauchy_derivatives([&](cplx s) { return sc.h(s); }, z, r);
    (void)d1;
    const cplx rhs = -4.0 / kappa / (z - 1.0) + (-1.0 + 2.0 / kappa * (1.0 + alpha)) / z;
    out.sc = std::abs(d2 / sc.h_prime(z) - rhs);
  }
  {
    const ChargeVector q = cardy_zhan_charges(kappa, alpha);
    const auto cft = classify::CftParams::from_kappa(kappa);
    const double r = 0.4 * std::min({z.imag(), std::abs(z), std::abs(z - 1.0), std::abs(z + 1.0)});
    auto M = [&](cplx s) { return vertex_correlation(q, cft.bg, cft.a, s, VertexVariant::Inserted); };
    const auto [d1, d2] = cauchy_derivatives(M, z, r);
    (void)d2;
    const cplx rhs = -4.0 / kappa / z + (-1.0 + 2.0 / kappa * (1.0 - alpha)) / (z - 1.0) +
                     (-1.0 + 2.0 / kappa * (1.0 + alpha)) / (z + 1.0);
    out.remark = std::abs(d1 / M(z) - rhs);
  }
  return out;
}

double phi_hat_one_point(const FlowModel& model, cplx z) {
  require_off_branch(z, model.family == Family::DipolarDrift);
  const auto& c = model.cft;
  switch (model.family) {
    case Family::ChordalDrift:
      return 2.0 * c.a * std::arg(z) + model.alpha * c.a * z.imag();
    case Family::DipolarDrift: {
      const double d = model.alpha * c.a;
      return 2.0 * c.a * std::arg(z) - (c.a - d) * std::arg(1.0 + z) - (c.a + d) * std::arg(1.0 - z) +
             2.0 * c.bg * std::arg(1.0 - z * z);
    }
    default:
      throw Error(ErrorCode::ParameterRange, "one-point function defined for chordal and dipolar flows only");
  }
}

double phi_hat_one_point_q(double kappa, double alpha, double q, cplx z) {
  if (!(q > 0.0)) throw Error(ErrorCode::ParameterRange, "marked points need q > 0");
  if (!(z.imag() > 0.0)) throw Error(ErrorCode::BoundaryInput, "point must lie in the upper half-plane");
  const auto c = classify::CftParams::from_kappa(kappa);
  const double d = 0.5 * alpha * c.a * q;
  return 2.0 * c.a * std::arg(z) - (c.a + d) * std::arg(q - z) - (c.a - d) * std::arg(q + z) +
         2.0 * c.bg * std::arg(q * q - z * z);
}

// ---- ensembles ------------------------------------------------------------------------

bool SuiteResult::all_pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const stats::McReport& r) { return r.pass; });
}

namespace {

std::string show(cplx z) { return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i"; }

void stamp(stats::McReport& r, const FlowModel& m, std::uint64_t seed, double dt) {
  r.kappa = m.kappa;
  r.alpha = m.alpha;
  r.seed = seed;
  r.dt = dt;
}

}  // namespace

SuiteResult martingale_suite(const FlowModel& model, std::span<const cplx> points,
                             std::span<const std::pair<std::size_t, std::size_t>> pairs, const SuiteConfig& cfg) {
  if (points.empty()) throw Error(ErrorCode::ParameterRange, "martingale suite needs at least one point");
  for (const auto& [i, j] : pairs)
    if (i >= points.size() || j >= points.size() || i == j) throw Error(ErrorCode::ParameterRange, "bad pair index");
  const HarmonicU u = classify::build_u(model);
  const double bg = model.cft.bg;
  const std::size_t P = points.size(), Q = pairs.size();
  const std::size_t width = P + Q + 2;
  std::vector<double> inc(cfg.n_paths * width);
  std::vector<char> swallowed(cfg.n_paths, 0);

  std::vector<double> u0(P);
  for (std::size_t i = 0; i < P; ++i) u0[i] = u(points[i]);
  std::vector<double> m0(Q);
  for (std::size_t q = 0; q < Q; ++q)
    m0[q] = u0[pairs[q].first] * u0[pairs[q].second] +
            2.0 * conformal::green_half_plane_raw(points[pairs[q].first], points[pairs[q].second]);
  const cplx v0 = vertex_observable(model, points[0], 0.0);

  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t n) {
    const auto d = flow::sample_driving(model.kappa, model.alpha, cfg.T, cfg.dt, rng::path_seed(cfg.seed, n));
    flow::SlitFlowEnsemble ens(model, points, cfg.flow);
    ens.run(d, cfg.T);
    double* row = inc.data() + n * width;
    std::vector<double> ut(P);
    for (std::size_t i = 0; i < P; ++i) {
      ut[i] = u_value(u, bg, ens.w(i), ens.log_wp(i));
      row[i] = ut[i] - u0[i];
      if (!ens.alive(i)) swallowed[n] = 1;
    }
    for (std::size_t q = 0; q < Q; ++q) {
      const auto [i, j] = pairs[q];
      row[P + q] = ut[i] * ut[j] + 2.0 * conformal::green_half_plane_raw(ens.w(i), ens.w(j)) - m0[q];
    }
    const cplx v = vertex_observable(model, ens.w(0), ens.log_wp(0));
    row[P + Q] = v.real() - v0.real();
    row[P + Q + 1] = v.imag() - v0.imag();
  });

  SuiteResult res;
  std::vector<stats::RunningStats> acc(width);
  for (std::size_t n = 0; n < cfg.n_paths; ++n) {
    for (std::size_t c = 0; c < width; ++c) acc[c].add(inc[n * width + c]);
    res.swallowed += swallowed[n] ? 1 : 0;
  }
  const std::string fam = classify::to_string(model.family);
  for (std::size_t i = 0; i < P; ++i) res.reports.push_back(drift_test(fam + " u_t(" + show(points[i]) + ")", acc[i]));
  for (std::size_t q = 0; q < Q; ++q)
    res.reports.push_back(drift_test(
        fam + " M_t(" + show(points[pairs[q].first]) + "," + show(points[pairs[q].second]) + ")", acc[P + q]));
  res.reports.push_back(drift_test(fam + " Re vertex(" + show(points[0]) + ")", acc[P + Q]));
  res.reports.push_back(drift_test(fam + " Im vertex(" + show(points[0]) + ")", acc[P + Q + 1]));
  for (auto& r : res.reports) stamp(r, model, cfg.seed, cfg.dt);
  return res;
}

QvResult qv_check(const FlowModel& model, const gff::TestFn& p, const QvConfig& cfg) {
  const HarmonicU u = classify::build_u(model);
  const double bg = model.cft.bg;
  const gff::QuadMesh mesh = gff::bump_mesh(p, cfg.per_diameter);
  const std::vector<double> pv = gff::sample_on(p, mesh);
  const std::vector<cplx> zero(mesh.points.size(), cplx(0.0));
  QvResult out;
  out.e0 = gff::energy_from_images(mesh, pv, mesh.points, zero);

  std::vector<double> qv(cfg.n_paths), drop(cfg.n_paths);
  std::vector<char> hit(cfg.n_paths, 0);
  const double w2 = mesh.weight();
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t n) {
    const auto d = flow::sample_driving(model.kappa, model.alpha, cfg.T, cfg.dt, rng::path_seed(cfg.seed, n));
    flow::SlitFlowEnsemble ens(model, mesh.points, cfg.flow);
    auto pairing = [&]() {
      double s = 0.0;
      for (std::size_t j = 0; j < pv.size(); ++j)
        if (pv[j] != 0.0) s += u_value(u, bg, ens.w(j), ens.log_wp(j)) * pv[j];
      return s * w2;
    };
    double prev = pairing();
    double sum = 0.0;
    for (std::size_t k = 0; k < d.steps() && d.times[k + 1] <= cfg.T * (1.0 + 1e-12); ++k) {
      ens.advance(d, k);
      const double cur = pairing();
      sum += (cur - prev) * (cur - prev);
      prev = cur;
    }
    for (std::size_t j = 0; j < pv.size(); ++j)
      if (!ens.alive(j)) hit[n] = 1;
    qv[n] = sum;
    drop[n] = out.e0 - gff::energy_from_images(mesh, pv, ens.w_all(), ens.log_wp_all());
  });

  stats::RunningStats diff, qacc, dacc;
  for (std::size_t n = 0; n < cfg.n_paths; ++n) {
    diff.add(qv[n] - drop[n]);
    qacc.add(qv[n]);
    dacc.add(drop[n]);
    out.collisions += hit[n] ? 1 : 0;
  }
  out.report = stats::make_report("qv - (E0 - E_T)", diff, 0.0);
  stamp(out.report, model, cfg.seed, cfg.dt);
  out.qv_mean = qacc.mean();
  out.drop_mean = dacc.mean();
  out.rel_error = std::abs(out.qv_mean - out.drop_mean) / std::abs(out.drop_mean);
  out.report.pass = out.rel_error < 0.1;
  out.report.note = "pass iff relative error < 0.1";
  return out;
}

HadamardResult hadamard_pathwise(const FlowModel& model, cplx z1, cplx z2, double T, double dt,
                                 std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (model.sigma.s0() != 0.0 || model.sigma.s1() != 0.0)
    throw Error(ErrorCode::ParameterRange, "pathwise Hadamard check needs sigma = -1");
  const HarmonicU u = classify::build_u(model);
  const double bg = model.cft.bg;
  const cplx start[2] = {z1, z2};
  std::vector<double> gerr(n_paths), realized(n_paths), predicted(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t n) {
    const auto d = flow::sample_driving(model.kappa, model.alpha, T, dt, rng::path_seed(seed, n));
    flow::SlitFlowEnsemble ens(model, start, {});
    const double g0 = conformal::green_half_plane_raw(z1, z2);
    auto rate = [&]() { return -4.0 * (1.0 / ens.w(0)).imag() * (1.0 / ens.w(1)).imag(); };
    auto lsig = [&](std::size_t i) { return classify::lie_sigma_of_u(model, u, ens.w(i)); };
    double integral = 0.0, cov = 0.0, pred = 0.0;
    double u1 = u_value(u, bg, ens.w(0), ens.log_wp(0)), u2 = u_value(u, bg, ens.w(1), ens.log_wp(1));
    for (std::size_t k = 0; k < d.steps() && d.times[k + 1] <= T * (1.0 + 1e-12); ++k) {
      const double h = d.times[k + 1] - d.times[k];
      const double r0 = rate();
      pred += model.kappa * lsig(0) * lsig(1) * h;
      ens.advance(d, k);
      if (!ens.alive(0) || !ens.alive(1)) break;
      integral += 0.5 * (r0 + rate()) * h;
      const double n1 = u_value(u, bg, ens.w(0), ens.log_wp(0)), n2 = u_value(u, bg, ens.w(1), ens.log_wp(1));
      cov += (n1 - u1) * (n2 - u2);
      u1 = n1;
      u2 = n2;
    }
    gerr[n] = std::abs(integral - (conformal::green_half_plane_raw(ens.w(0), ens.w(1)) - g0));
    realized[n] = cov;
    predicted[n] = pred;
  });
  HadamardResult out;
  out.n = n_paths;
  stats::RunningStats ra, pa;
  for (std::size_t n = 0; n < n_paths; ++n) {
    out.green_error = std::max(out.green_error, gerr[n]);
    ra.add(realized[n]);
    pa.add(predicted[n]);
  }
  out.realized = ra.mean();
  out.predicted = pa.mean();
  out.covariation_rel = std::abs(out.realized - out.predicted) / std::abs(out.predicted);
  return out;
}

bool CouplingResult::pass() const {
  return mean_report.pass && variance_rel < 0.05 && ks < ks_critical;
}

CouplingResult coupling_experiment(const FlowModel& model, const CouplingExperimentConfig& cfg) {
  const gff::EigenBasis basis = gff::eigen_basis(cfg.domain);
  const gff::QuadMesh mesh = gff::bump_mesh(cfg.bump, cfg.per_diameter);
  const std::vector<double> pv = gff::sample_on(cfg.bump, mesh);
  const HarmonicU u = classify::build_u(model);
  CouplingResult out;
  const double target_mean = gff::pair_function([&](cplx z) { return u(z); }, cfg.bump, mesh);
  out.target_variance = gff::energy_product(mesh, pv, pv, gff::half_plane_kernel());
  out.spectral_variance = gff::spectral_energy(basis, mesh, pv);

  std::vector<gff::CoupledSample> raw(cfg.n_samples);
  parallel_for(cfg.n_samples, cfg.threads, [&](std::size_t n) {
    const std::uint64_t s = rng::path_seed(cfg.seed, n);
    raw[n] = gff::coupled_sample(model, u, basis, cfg.bump, mesh, cfg.coupling, rng::stream_seed(s, 11),
                                 rng::stream_seed(s, 12));
  });
  stats::RunningStats acc;
  for (const auto& r : raw) {
    if (r.collision) {
      ++out.collisions;
      continue;
    }
    acc.add(r.value);
    out.samples.push_back(r.value);
  }
  out.mean_report = stats::make_report("coupled pairing mean", acc, target_mean);
  stamp(out.mean_report, model, cfg.seed, cfg.coupling.dt);
  out.variance = acc.variance();
  out.variance_rel = std::abs(out.variance - out.target_variance) / out.target_variance;
  out.ks = stats::ks_normal_statistic(out.samples, target_mean, std::sqrt(out.target_variance));
  out.ks_critical = stats::ks_critical_1pct(out.samples.size());
  return out;
}

std::string reports_csv(std::span<const stats::McReport> rows) {
  std::string out = "name,kappa,alpha,n,mean,se,target,zscore,pass\n";
  for (const auto& r : rows) {
    out += "\"" + r.name + "\"," + format_double(r.kappa) + "," + format_double(r.alpha) + "," + std::to_string(r.n) +
           "," + format_double(r.mean) + "," + format_double(r.se) + "," + format_double(r.target) + "," +
           format_double(r.zscore) + "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace slitflow::obs
