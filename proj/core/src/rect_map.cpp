#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>

#include "slitflow/conformal.hpp"
#include "slitflow/error.hpp"

namespace slitflow::conformal {

namespace {

struct SnCnDn {
  cplx sn, cn, dn;
};

// Addition formulas for u = x + iy using real functions of modulus k and k'.
SnCnDn jacobi_all(cplx u, double k) {
  const double kp = std::sqrt(1.0 - k * k);
  double c, d, c1, d1;
  const double s = boost::math::jacobi_elliptic(k, u.real(), &c, &d);
  const double s1 = boost::math::jacobi_elliptic(kp, u.imag(), &c1, &d1);
  const double den = c1 * c1 + k * k * s * s * s1 * s1;
  return {cplx(s * d1, c * d * s1 * c1) / den, cplx(c * c1, -s * d * s1 * d1) / den,
          cplx(d * c1 * d1, -k * k * s * c * s1) / den};
}

}  // namespace

cplx jacobi_sn(cplx u, double k) { return jacobi_all(u, k).sn; }

RectangleMap::RectangleMap(double x0, double y0, double width, double height)
    : x0_(x0), y0_(y0), w_(width), h_(height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw Error(ErrorCode::ParameterRange, "rectangle sides must be positive");
  }
  // sn maps [-K, K] x [0, K'] onto the half-plane: need K'(k)/K(k) = 2h/w.
  const double target = 2.0 * height / width;
  auto ratio = [](double k) {
    return boost::math::ellint_1(std::sqrt(1.0 - k * k)) / boost::math::ellint_1(k);
  };
  double lo = 1e-300, hi = 1.0 - 1e-16;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target) lo = mid; else hi = mid;
  }
  k_ = 0.5 * (lo + hi);
  scale_ = 2.0 * boost::math::ellint_1(k_) / width;
}

bool RectangleMap::in_domain(cplx z) const {
  return z.real() > x0_ && z.real() < x0_ + w_ && z.imag() > y0_ && z.imag() < y0_ + h_;
}

cplx RectangleMap::operator()(cplx z) const {
  if (!in_domain(z)) throw Error(ErrorCode::DomainExit, "point outside rectangle");
  const cplx u = scale_ * (z - cplx(x0_ + 0.5 * w_, y0_));
  return jacobi_all(u, k_).sn;
}

cplx RectangleMap::derivative(cplx z) const {
  const cplx u = scale_ * (z - cplx(x0_ + 0.5 * w_, y0_));
  const auto v = jacobi_all(u, k_);
  return scale_ * v.cn * v.dn;
}

}  // namespace slitflow::conformal
