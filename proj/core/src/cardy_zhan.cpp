#include <algorithm>
#include <cmath>

#include "slitflow/error.hpp"
#include "slitflow/format.hpp"
#include "slitflow/observables.hpp"
#include "slitflow/parallel.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::obs {

namespace {

struct StripWalker {
  double kappa, sk, alpha, eps, ratio;
  std::uint64_t bridge;
  cplx Z;
  bool dead = false;

  void euler(double h, double db) {
    const cplx next = Z + (flow::strip_velocity(Z) - alpha) * h - sk * db;
    if (std::abs(next) < eps || next.imag() <= 0.0) {
      dead = true;
      return;
    }
    Z = next;
  }

  void refine(double h, double db, int level, std::uint64_t n, std::uint64_t idx) {
    if (dead) return;
    if (h <= ratio * std::norm(Z) || level >= 60) {
      euler(h, db);
      return;
    }
    const double left =
        0.5 * db + 0.5 * std::sqrt(h) * rng::counter_normal(bridge, n, static_cast<std::uint64_t>(level + 1), 2 * idx);
    refine(0.5 * h, left, level + 1, n, 2 * idx);
    refine(0.5 * h, db - left, level + 1, n, 2 * idx + 1);
  }
};

}  // namespace

Endpoint cardy_zhan_path(double kappa, double alpha, cplx z, const conformal::ScMap& sc, const CardyZhanConfig& cfg,
                         std::uint64_t path_seed) {
  if (!(z.imag() > 0.0 && z.imag() < M_PI)) throw Error(ErrorCode::BoundaryInput, "start outside the strip");
  rng::Engine eng(rng::stream_seed(path_seed, 1));
  rng::Normal normal;
  StripWalker wk{kappa, std::sqrt(kappa), alpha, cfg.eps_swallow, cfg.refine_ratio, rng::stream_seed(path_seed, 2), z};
  if (std::abs(z) < cfg.eps_swallow) return Endpoint::Swallowed;
  double t = 0.0;
  std::uint64_t n = 0;
  while (t < cfg.T_max) {
    const bool coarse = std::abs(wk.Z.real()) >= cfg.fine_band;
    const double h = std::min(coarse ? cfg.coarse_dt : cfg.dt, cfg.T_max - t);
    const double db = std::sqrt(h) * normal(eng);
    if (coarse)
      wk.euler(h, db);
    else
      wk.refine(h, db, 0, n, 0);
    ++n;
    t += h;
    if (wk.dead) return Endpoint::Swallowed;
    if (wk.Z.real() > cfg.escape) return Endpoint::Right;
    if (wk.Z.real() < -cfg.escape) return Endpoint::Left;
  }
  const conformal::TriangleSpec& tri = sc.triangle();
  const cplx f = sc.f(wk.Z);
  if (std::abs(f - tri.A) < cfg.eps_class) return Endpoint::Swallowed;
  if (std::abs(f - tri.B) < cfg.eps_class) return Endpoint::Right;
  if (std::abs(f - tri.C) < cfg.eps_class) return Endpoint::Left;
  return Endpoint::Ambiguous;
}

bool CardyZhanResult::pass() const { return a.pass && b.pass && c.pass && ambiguous_frac < 0.05; }

CardyZhanResult cardy_zhan(double kappa, double alpha, cplx z, const CardyZhanConfig& cfg) {
  if (!(kappa > 4.0)) throw Error(ErrorCode::ParameterRange, "Cardy-Zhan experiment needs kappa > 4");
  const conformal::ScMap sc = conformal::sc_map_build(kappa, alpha);
  std::vector<int> ends(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t i) {
    ends[i] = static_cast<int>(cardy_zhan_path(kappa, alpha, z, sc, cfg, rng::path_seed(cfg.seed, i)));
  });
  CardyZhanResult out;
  out.z = z;
  out.oracle = conformal::barycentric(sc.f(z), sc.triangle());
  stats::RunningStats sa, sb, sc_;
  for (int e : ends) {
    ++out.counts[e];
    sa.add(e == 0 ? 1.0 : 0.0);
    sb.add(e == 1 ? 1.0 : 0.0);
    sc_.add(e == 2 ? 1.0 : 0.0);
  }
  out.ambiguous_frac = static_cast<double>(out.counts[3]) / static_cast<double>(cfg.n_paths);
  auto finish = [&](const char* name, const stats::RunningStats& acc, double target) {
    stats::McReport r = stats::make_report(std::string(name) + "(" + format_double(z.real()) + "+" +
                                               format_double(z.imag()) + "i)",
                                           acc, target);
    r.kappa = kappa;
    r.alpha = alpha;
    r.seed = cfg.seed;
    r.dt = cfg.dt;
    r.pass = std::abs(r.mean - target) < std::max(0.02, 3.0 * r.se);
    r.note = "pass iff |mc - oracle| < max(0.02, 3 se)";
    return r;
  };
  out.a = finish("swallowed", sa, out.oracle.a);
  out.b = finish("right", sb, out.oracle.b);
  out.c = finish("left", sc_, out.oracle.c);
  return out;
}

std::string cardy_zhan_csv(std::span<const CardyZhanResult> rows) {
  std::string out = "re_z,im_z,a_mc,b_mc,c_mc,a_sc,b_sc,c_sc,se,ambiguous_frac\n";
  for (const auto& r : rows) {
    const double se = std::max({r.a.se, r.b.se, r.c.se});
    out += format_double(r.z.real()) + "," + format_double(r.z.imag()) + "," + format_double(r.a.mean) + "," +
           format_double(r.b.mean) + "," + format_double(r.c.mean) + "," + format_double(r.oracle.a) + "," +
           format_double(r.oracle.b) + "," + format_double(r.oracle.c) + "," + format_double(se) + "," +
           format_double(r.ambiguous_frac) + "\n";
  }
  return out;
}

}  // namespace slitflow::obs
