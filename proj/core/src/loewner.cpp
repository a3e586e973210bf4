#include <algorithm>
#include <cmath>

#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"

namespace slitflow::flow {

namespace {

struct State {
  cplx z;
  cplx l;
};

struct Rates {
  cplx dz;
  cplx dl;
};

using RateFn = Rates (*)(cplx, double);

Rates chordal_rates(cplx z, double slope) {
  const cplx iz = 1.0 / z;
  return {2.0 * iz - slope, -2.0 * iz * iz};
}

Rates strip_rates(cplx z, double slope) {
  const cplx sh = std::sinh(0.5 * z);
  return {strip_velocity(z) - slope, -0.5 / (sh * sh)};
}

State rk4(RateFn f, const State& y, double h, double slope) {
  const Rates k1 = f(y.z, slope);
  const Rates k2 = f(y.z + 0.5 * h * k1.dz, slope);
  const Rates k3 = f(y.z + 0.5 * h * k2.dz, slope);
  const Rates k4 = f(y.z + h * k3.dz, slope);
  return {y.z + h / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz),
          y.l + h / 6.0 * (k1.dl + 2.0 * k2.dl + 2.0 * k3.dl + k4.dl)};
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

enum class Stop { None, Swallowed };

/// Step-doubling RK4 across a signed span; `stop` is checked after every accepted step.
template <class StopFn>
Stop integrate_span(RateFn f, State& y, double span, double slope, double tol, double cap_c,
                    double& h_hint, StopFn stop, double* elapsed = nullptr) {
  const double dir = span < 0 ? -1.0 : 1.0;
  double left = std::abs(span);
  int rejects = 0;
  while (left > 0.0) {
    double h = std::min({left, h_hint > 0 ? h_hint : left, cap_c * std::norm(y.z)});
    if (!(h > 0.0)) throw Error(ErrorCode::StepDegeneration, "Loewner step collapsed");
    const State full = rk4(f, y, dir * h, slope);
    const State mid = rk4(f, y, 0.5 * dir * h, slope);
    const State two = rk4(f, mid, 0.5 * dir * h, slope);
    const double scale = std::max(1.0, std::abs(two.z));
    const double err = std::max(std::abs(two.z - full.z), std::abs(two.l - full.l) / std::max(1.0, std::abs(two.l))) / 15.0;
    if (!finite(two.z) || err > tol * scale) {
      h_hint = 0.5 * h;
      if (++rejects > 200) throw Error(ErrorCode::StepDegeneration, "Loewner step rejected repeatedly");
      continue;
    }
    rejects = 0;
    y.z = two.z + (two.z - full.z) / 15.0;
    y.l = two.l + (two.l - full.l) / 15.0;
    left -= h;
    if (left < 1e-15 * std::abs(span)) left = 0.0;
    const double grow = err > 0 ? 0.9 * std::pow(tol * scale / err, 0.2) : 4.0;
    h_hint = h * std::clamp(grow, 0.2, 4.0);
    if (stop(y)) {
      if (elapsed) *elapsed = std::abs(span) - left;
      return Stop::Swallowed;
    }
  }
  return Stop::None;
}

FlowPath solve_forward(RateFn f, const char* scheme, const DrivingPath& d, cplx z0,
                       const LoewnerOptions& opt, bool strip) {
  if (strip ? !(z0.imag() > 0.0 && z0.imag() < M_PI) : !(z0.imag() > 0.0))
    throw Error(ErrorCode::BoundaryInput, "Loewner start outside the domain");
  FlowPath p;
  p.z0 = z0;
  p.scheme = scheme;
  State y{z0 - d.xi.front(), 0.0};
  const std::size_t stride = std::max<std::size_t>(1, opt.record_stride);
  auto record = [&](std::size_t k) {
    p.t.push_back(d.times[k]);
    p.w.push_back(y.z);
    p.g.push_back(y.z + d.xi[k]);
    p.log_wp.push_back(y.l);
  };
  record(0);
  if (std::abs(y.z) < opt.eps_swallow) {
    p.swallowed = true;
    p.tau = 0.0;
    return p;
  }
  double h_hint = 0.0;
  auto stop = [&](const State& s) { return std::abs(s.z) < opt.eps_swallow || s.z.imag() <= 0.0; };
  for (std::size_t k = 0; k < d.steps(); ++k) {
    const double h = d.times[k + 1] - d.times[k];
    const double slope = (d.xi[k + 1] - d.xi[k]) / h;
    double elapsed = 0.0;
    if (integrate_span(f, y, h, slope, opt.tol, opt.step_c, h_hint, stop, &elapsed) == Stop::Swallowed) {
      p.swallowed = true;
      p.tau = d.times[k] + elapsed;
      return p;
    }
    if ((k + 1) % stride == 0 || k + 1 == d.steps()) record(k + 1);
  }
  return p;
}

}  // namespace

FlowPath chordal_loewner(const DrivingPath& d, cplx z0, const LoewnerOptions& opt) {
  return solve_forward(&chordal_rates, "rk4-adaptive/chordal", d, z0, opt, false);
}

FlowPath dipolar_loewner(const DrivingPath& d, cplx z0, const LoewnerOptions& opt) {
  return solve_forward(&strip_rates, "rk4-adaptive/strip", d, z0, opt, true);
}

std::vector<cplx> trace_points(const DrivingPath& d, std::span<const double> times, double eps_trace) {
  std::vector<cplx> out;
  out.reserve(times.size());
  const double tol = 1e-10;
  for (double t : times) {
    if (t < 0.0 || t > d.horizon() * (1.0 + 1e-12))
      throw Error(ErrorCode::ParameterRange, "trace time outside the driving horizon");
    auto it = std::upper_bound(d.times.begin(), d.times.end(), t);
    std::size_t k = it == d.times.begin() ? 0 : static_cast<std::size_t>(it - d.times.begin()) - 1;
    if (k >= d.steps()) k = d.steps() - 1;
    auto slope_of = [&](std::size_t j) { return (d.xi[j + 1] - d.xi[j]) / (d.times[j + 1] - d.times[j]); };
    State y{cplx(0.0, eps_trace), 0.0};
    double h_hint = 0.0;
    auto stop = [](const State& s) {
      if (!finite(s.z) || s.z.imag() <= 0.0)
        throw Error(ErrorCode::ReversalInstability, "reversed Loewner flow left the half-plane");
      return false;
    };
    double upper = t;
    for (std::size_t j = k + 1; j-- > 0;) {
      const double span = d.times[j] - upper;
      if (span < 0.0) integrate_span(&chordal_rates, y, span, slope_of(j), tol, 0.1, h_hint, stop);
      upper = d.times[j];
    }
    out.push_back(y.z + d.xi[0]);
  }
  return out;
}

}  // namespace slitflow::flow
