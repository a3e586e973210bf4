#include <cmath>
#include <sstream>

#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/format.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::flow {

SlitFlowEnsemble::SlitFlowEnsemble(const FlowModel& model, std::span<const cplx> z0, FlowOptions opt)
    : kappa_(model.kappa),
      sk_(std::sqrt(model.kappa)),
      bm1_(model.b.bm1()),
      b0_(model.b.b0()),
      b1_(model.b.b1()),
      s0_(model.sigma.s0()),
      s1_(model.sigma.s1()),
      opt_(opt),
      w_(z0.begin(), z0.end()),
      lw_(z0.size(), cplx(0.0)),
      alive_(z0.size(), 1),
      tau_(z0.size(), std::numeric_limits<double>::infinity()) {
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!(w_[i].imag() > 0.0)) throw Error(ErrorCode::BoundaryInput, "flow start must lie in the upper half-plane");
    if (std::abs(w_[i]) < opt_.eps_swallow) {
      alive_[i] = 0;
      tau_[i] = 0.0;
    }
  }
}

void SlitFlowEnsemble::euler(std::size_t i, double t0, double h, double db) {
  const cplx w = w_[i];
  const cplx iw = 1.0 / w;
  const cplx b = -2.0 * iw - bm1_ - b0_ * w - b1_ * w * w;
  const cplx bp = 2.0 * iw * iw - b0_ - 2.0 * b1_ * w;
  const cplx s = -1.0 - s0_ * w - s1_ * w * w;
  const cplx sp = -s0_ - 2.0 * s1_ * w;
  const double spp = -2.0 * s1_;
  const double hk = 0.5 * kappa_;

  const cplx wn = w + (-b + hk * s * sp) * h + sk_ * s * db;
  const cplx ln = lw_[i] + (-bp + hk * s * spp) * h + sk_ * sp * db;

  if (!std::isfinite(wn.real()) || !std::isfinite(wn.imag()) || std::abs(wn) > opt_.r_max) {
    std::ostringstream msg;
    msg << "flow point left the radius " << opt_.r_max << " at t=" << t0 + h;
    throw Error(ErrorCode::StepExplosion, msg.str());
  }
  if (std::abs(wn) < opt_.eps_swallow || wn.imag() <= 0.0) {
    alive_[i] = 0;
    tau_[i] = t0 + h;
    return;
  }
  w_[i] = wn;
  lw_[i] = ln;
}

void SlitFlowEnsemble::refine(std::size_t i, double t0, double h, double db, int level,
                              std::uint64_t n, std::uint64_t idx, const DrivingPath& d) {
  if (!alive_[i]) return;
  const double r2 = std::norm(w_[i]);
  if (h <= opt_.refine_c * r2 || level >= opt_.max_level) {
    euler(i, t0, h, db);
    return;
  }
  const double half = 0.5 * h;
  double left = 0.5 * db;
  if (d.stochastic)
    left += 0.5 * std::sqrt(h) *
            rng::counter_normal(d.bridge_seed(), n, static_cast<std::uint64_t>(level + 1), 2 * idx);
  refine(i, t0, half, left, level + 1, n, 2 * idx, d);
  refine(i, t0 + half, half, db - left, level + 1, n, 2 * idx + 1, d);
}

void SlitFlowEnsemble::advance(const DrivingPath& d, std::size_t n) {
  if (n >= d.steps()) throw Error(ErrorCode::ParameterRange, "grid interval out of range");
  const double t0 = d.times[n];
  const double h = d.times[n + 1] - t0;
  for (std::size_t i = 0; i < w_.size(); ++i) refine(i, t0, h, d.dB[n], 0, n, 0, d);
  t_ = d.times[n + 1];
}

void SlitFlowEnsemble::run(const DrivingPath& d, double T) {
  for (std::size_t n = 0; n < d.steps() && d.times[n + 1] <= T * (1.0 + 1e-12); ++n) advance(d, n);
}

FlowPath integrate_slit_flow(const FlowModel& model, cplx z0, const DrivingPath& d,
                             const FlowOptions& opt) {
  FlowPath p;
  p.z0 = z0;
  p.scheme = "euler-maruyama/bridge-refined";
  const cplx start[1] = {z0};
  SlitFlowEnsemble ens(model, start, opt);
  const std::size_t stride = std::max<std::size_t>(1, opt.record_stride);
  auto record = [&](double t) {
    p.t.push_back(t);
    p.w.push_back(ens.w(0));
    p.log_wp.push_back(ens.log_wp(0));
  };
  record(0.0);
  for (std::size_t n = 0; n < d.steps() && ens.alive(0); ++n) {
    ens.advance(d, n);
    if (!ens.alive(0)) break;
    if ((n + 1) % stride == 0 || n + 1 == d.steps()) record(d.times[n + 1]);
  }
  p.swallowed = !ens.alive(0);
  p.tau = ens.tau(0);
  return p;
}

HullSample hull_scan(const FlowModel& model, const DrivingPath& d, std::span<const cplx> grid,
                     double T, const FlowOptions& opt) {
  SlitFlowEnsemble ens(model, grid, opt);
  ens.run(d, T);
  HullSample out;
  out.points.assign(grid.begin(), grid.end());
  out.horizon = ens.time();
  out.swallowed.resize(grid.size());
  out.tau.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.swallowed[i] = ens.alive(i) ? 0 : 1;
    out.tau[i] = ens.tau(i);
  }
  return out;
}

std::string path_ndjson(const FlowPath& p, std::uint64_t path_id) {
  std::string out;
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    const bool last = k + 1 == p.t.size();
    out += "{\"path_id\":" + std::to_string(path_id) + ",\"t\":" + format_double(p.t[k]) +
           ",\"re_w\":" + format_double(p.w[k].real()) + ",\"im_w\":" + format_double(p.w[k].imag()) +
           ",\"re_logwp\":" + format_double(p.log_wp[k].real()) +
           ",\"im_logwp\":" + format_double(p.log_wp[k].imag()) +
           ",\"swallowed\":" + ((last && p.swallowed) ? "true" : "false") + "}\n";
  }
  return out;
}

}  // namespace slitflow::flow
