#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "slitflow/classifier.hpp"
#include "slitflow/error.hpp"

namespace slitflow::classify {

double HarmonicU::operator()(cplx z) const { return U(z).imag(); }

cplx HarmonicU::U(cplx z) const {
  cplx v = c0 + c1 * z;
  for (const auto& t : logs) v += t.coef * std::log(t.orient * (z - t.root));
  for (const auto& p : poles) v += p.coef / std::pow(z - p.root, p.order);
  return v;
}

cplx HarmonicU::dU(cplx z) const {
  cplx v = c1;
  for (const auto& t : logs) v += t.coef / (z - t.root);
  for (const auto& p : poles) v -= double(p.order) * p.coef / std::pow(z - p.root, p.order + 1);
  return v;
}

cplx HarmonicU::d2U(cplx z) const {
  cplx v = 0.0;
  for (const auto& t : logs) {
    const cplx d = z - t.root;
    v -= t.coef / (d * d);
  }
  for (const auto& p : poles) {
    v += double(p.order * (p.order + 1)) * p.coef / std::pow(z - p.root, p.order + 2);
  }
  return v;
}

namespace {

void require_continuous(const HarmonicU& u) {
  for (const auto& t : u.logs) {
    if (t.root.imag() > 0.0 &&
        std::abs(t.coef.real()) > 1e-12 * std::max(1.0, std::abs(t.coef))) {
      throw Error(ErrorCode::BranchObstruction,
                  "arg term around an interior zero of sigma has nonzero weight");
    }
  }
}

}  // namespace

cplx observable_derivative(const FlowModel& m, cplx z) {
  const double a = m.cft.a, bg = m.cft.bg;
  const cplx s = m.sigma.eval(z);
  return -a * (2.0 + m.alpha * z) / (z * s) + 2.0 * bg * m.sigma.prime(z) / s;
}

HarmonicU build_u_generic(const FlowModel& m) {
  HarmonicU u;
  u.tag = "partial-fractions";
  const double a = m.cft.a, bg = m.cft.bg, alpha = m.alpha;
  u.mu = -2.0 * bg;
  const double s0 = m.sigma.s0(), s1 = m.sigma.s1();
  // Residue of (2+αz)/(zσ) at 0 is 2/σ(0) = -2.
  u.logs.push_back({2.0 * a, 0.0, 1.0});
  if (s1 == 0.0 && s0 == 0.0) {
    u.c1 = a * alpha;
  } else if (s1 == 0.0) {
    const double r = -1.0 / s0;
    const double B = (2.0 + alpha * r) / (r * -s0);
    u.logs.push_back({-a * B + 2.0 * bg, r, 1.0});
  } else {
    const double D = s0 * s0 - 4.0 * s1;
    if (std::abs(D) <= 1e-14 * std::max(s0 * s0, std::abs(4.0 * s1))) {
      const double r = -s0 / (2.0 * s1);
      const double B = 2.0 / (s1 * r * r);
      const double C = (2.0 + alpha * r) / (r * -s1);
      u.logs.push_back({-a * B + 4.0 * bg, r, 1.0});
      u.poles.push_back({a * C, r, 1});
    } else {
      const cplx sq = std::sqrt(cplx(D));
      for (const cplx r : {(-s0 + sq) / (2.0 * s1), (-s0 - sq) / (2.0 * s1)}) {
        const cplx B = (2.0 + alpha * r) / (r * (-s0 - 2.0 * s1 * r));
        u.logs.push_back({-a * B + 2.0 * bg, r, 1.0});
      }
    }
  }
  require_continuous(u);
  return u;
}

HarmonicU build_u(const FlowModel& m) {
  const double a = m.cft.a, bg = m.cft.bg, alpha = m.alpha;
  HarmonicU u;
  u.mu = -2.0 * bg;
  u.logs.push_back({2.0 * a, 0.0, 1.0});
  switch (m.family) {
    case Family::ChordalDrift:
      u.tag = "chordal-drift";
      u.c1 = alpha * a;
      break;
    case Family::ParabolicBeta:
      u.tag = "parabolic-beta";
      break;
    case Family::DipolarDrift:
      u.tag = "dipolar-drift";
      u.logs.push_back({2.0 * bg - a * (1.0 + alpha), 2.0, -1.0});
      u.logs.push_back({2.0 * bg - a * (1.0 - alpha), -2.0, 1.0});
      break;
    case Family::HyperbolicBeta:
      u.tag = m.sign > 0 ? "hyperbolic-beta+" : "hyperbolic-beta-";
      u.logs.push_back({(m.kappa - 6.0) * a, -2.0 * m.sign, double(m.sign)});
      break;
    case Family::Radial6Drift:
      u.tag = "radial6-drift";
      u.logs.push_back({cplx(0.0, -alpha * a), cplx(0.0, 2.0), 1.0});
      u.logs.push_back({cplx(0.0, alpha * a), cplx(0.0, -2.0), 1.0});
      break;
    case Family::Custom:
      return build_u_generic(m);
  }
  return u;
}

double u_increment_by_quadrature(const FlowModel& m, cplx z_ref, cplx z) {
  const cplx d = z - z_ref;
  auto f = [&](double t) { return (observable_derivative(m, z_ref + t * d) * d).imag(); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-14, &err);
}

double lie_b_of_u(const FlowModel& m, const HarmonicU& u, cplx z) {
  return (m.b.eval(z) * u.dU(z) + u.mu * m.b.prime(z)).imag();
}

double lie_sigma_of_u(const FlowModel& m, const HarmonicU& u, cplx z) {
  return (m.sigma.eval(z) * u.dU(z) + u.mu * m.sigma.prime(z)).imag();
}

double lie_sigma2_of_u(const FlowModel& m, const HarmonicU& u, cplx z) {
  // L_σ u = Im F with F = σU' + μσ'; the result is a (0,0)-form, so L_σ² u = Im(σF').
  const cplx s = m.sigma.eval(z), ds = m.sigma.prime(z), dds = m.sigma.second(z);
  const cplx dF = ds * u.dU(z) + s * u.d2U(z) + u.mu * dds;
  return (s * dF).imag();
}

ResidualReport check_annihilation(const FlowModel& m, const HarmonicU& u,
                                  std::span<const cplx> samples) {
  ResidualReport rep;
  for (const cplx z : samples) {
    const double r = std::abs(-lie_b_of_u(m, u, z) + 0.5 * m.kappa * lie_sigma2_of_u(m, u, z));
    rep.residuals.push_back(r);
    rep.max = std::max(rep.max, r);
  }
  return rep;
}

ResidualReport check_bsigma(const FlowModel& m, std::span<const cplx> samples) {
  ResidualReport rep;
  const double sk = std::sqrt(m.kappa);
  const double bg = m.cft.bg;
  for (const cplx z : samples) {
    const cplx den = z * (m.alpha * z + 2.0);
    if (std::abs(den) < 1e-12 * std::max(1.0, std::norm(z))) {
      ++rep.skipped;
      continue;
    }
    const cplx s = m.sigma.eval(z), ds = m.sigma.prime(z);
    const cplx b = m.b.eval(z), db = m.b.prime(z);
    const cplx num = -sk * s * (sk * s + m.beta * z * z) -
                     bg * std::sqrt(2.0 * m.kappa) * z * z * (db * s - b * ds);
    const double r = std::abs(b - num / den);
    rep.residuals.push_back(r);
    rep.max = std::max(rep.max, r);
  }
  return rep;
}

}  // namespace slitflow::classify
