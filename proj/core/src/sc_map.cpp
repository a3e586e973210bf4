#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "slitflow/conformal.hpp"
#include "slitflow/error.hpp"

namespace slitflow::conformal {

namespace {

// ∫_0^1 t^p g(t) dt for complex g smooth on [0,1]; power singularity at 0.
template <class G>
cplx singular_integral(double p, G g) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  auto re = [&](double t) { return std::pow(t, p) * g(t).real(); };
  auto im = [&](double t) { return std::pow(t, p) * g(t).imag(); };
  const double tol = 1e-14;
  return {rule.integrate(re, 0.0, 1.0, tol), rule.integrate(im, 0.0, 1.0, tol)};
}

}  // namespace

ScMap sc_map_build(double kappa, double alpha) {
  if (!(kappa > 4.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::ParameterRange, "Schwarz-Christoffel map needs kappa > 4");
  }
  if (!(std::abs(alpha) < 1.0)) {
    throw Error(ErrorCode::ParameterRange, "Schwarz-Christoffel map needs |alpha| < 1");
  }
  ScMap m;
  m.kappa_ = kappa;
  m.alpha_ = alpha;
  m.e0_ = -1.0 + 2.0 * (1.0 + alpha) / kappa;
  m.e1_ = -4.0 / kappa;
  const double beta_plus = boost::math::beta(2.0 * (1.0 - alpha) / kappa, 1.0 - 4.0 / kappa);
  const double beta_minus = boost::math::beta(2.0 * (1.0 + alpha) / kappa, 1.0 - 4.0 / kappa);
  m.norm_ = 1.0 / beta_plus;
  const cplx A = 0.0;
  const cplx B = 1.0;
  const cplx C = -m.norm_ * beta_minus * std::polar(1.0, M_PI * m.e1_);
  m.tri_ = TriangleSpec::from_vertices(A, B, C);
  return m;
}

cplx ScMap::h_prime(cplx zeta) const {
  return norm_ * std::pow(zeta, e0_) * std::pow(zeta - 1.0, e1_);
}

cplx ScMap::h(cplx zeta) const {
  if (zeta == cplx(0.0)) return tri_.C;
  if (zeta == cplx(1.0)) return tri_.A;
  const double r = std::abs(zeta);
  const bool left = zeta.real() < 0.0;
  enum { kZero, kOne, kInf } anchor;
  if (left) {
    anchor = r <= 1.0 ? kZero : kInf;
  } else if (r < 0.5) {
    anchor = kZero;
  } else if (r > 2.0) {
    anchor = kInf;
  } else {
    anchor = kOne;
  }
  switch (anchor) {
    case kZero: {
      const cplx I = singular_integral(e0_, [&](double t) { return std::pow(t * zeta - 1.0, e1_); });
      return tri_.C + norm_ * std::pow(zeta, 1.0 + e0_) * I;
    }
    case kOne: {
      const cplx d = zeta - 1.0;
      const cplx I = singular_integral(e1_, [&](double t) { return std::pow(1.0 + t * d, e0_); });
      return tri_.A + norm_ * std::pow(d, 1.0 + e1_) * I;
    }
    case kInf: {
      const cplx I =
          singular_integral(-2.0 - e0_ - e1_, [&](double t) { return std::pow(zeta - t, e1_); });
      return tri_.B - norm_ * std::pow(zeta, 1.0 + e0_) * I;
    }
  }
  return {};
}

cplx ScMap::f(cplx strip_point) const { return h(std::exp(strip_point)); }

}  // namespace slitflow::conformal
