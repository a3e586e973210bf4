#include "slitflow/conformal.hpp"

#include <cmath>
#include <sstream>

#include "slitflow/error.hpp"

namespace slitflow::conformal {

namespace {
std::string show(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}
}  // namespace

HalfPlanePoint::HalfPlanePoint(cplx z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.imag() > 0.0)) {
    throw Error(ErrorCode::BoundaryInput, "point not in the open upper half-plane: " + show(z));
  }
}

double green_half_plane_raw(cplx z1, cplx z2) {
  // log|z1 - conj z2|/|z1 - z2| = ½ log(1 + 4 y1 y2 / |z1 - z2|²), accurate near the boundary.
  const double d2 = std::norm(z1 - z2);
  return 0.5 * std::log1p(4.0 * z1.imag() * z2.imag() / d2);
}

double green_half_plane(HalfPlanePoint p1, HalfPlanePoint p2) {
  const cplx z1 = p1.value();
  const cplx z2 = p2.value();
  const double scale = std::max({1.0, std::abs(z1), std::abs(z2)});
  if (std::abs(z1 - z2) <= 1e-14 * scale) {
    throw Error(ErrorCode::CoincidentPoints, "Green's function at " + show(z1));
  }
  return green_half_plane_raw(z1, z2);
}

MobiusAut::MobiusAut(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorCode::ParameterRange, "Möbius determinant must be positive");
  }
  const double s = 1.0 / std::sqrt(det);
  m_ = {a * s, b * s, c * s, d * s};
}

MobiusAut MobiusAut::scaling(double s) { return MobiusAut(s, 0.0, 0.0, 1.0); }
MobiusAut MobiusAut::translation(double t) { return MobiusAut(1.0, t, 0.0, 1.0); }

cplx MobiusAut::operator()(cplx z) const {
  const auto& [a, b, c, d] = m_;
  return (a * z + b) / (c * z + d);
}

cplx MobiusAut::derivative(cplx z) const {
  const auto& [a, b, c, d] = m_;
  const cplx den = c * z + d;
  return (a * d - b * c) / (den * den);
}

MobiusAut MobiusAut::inverse() const {
  const auto& [a, b, c, d] = m_;
  return MobiusAut(d, -b, -c, a);
}

MobiusAut MobiusAut::compose(const MobiusAut& o) const {
  const auto& [a, b, c, d] = m_;
  const auto& [p, q, r, s] = o.m_;
  return MobiusAut(a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s);
}

double green_pullback(const ConformalMap& w, cplx z1, cplx z2) {
  if (!w.in_domain(z1) || !w.in_domain(z2)) {
    throw Error(ErrorCode::DomainExit, "point outside the map's domain");
  }
  const cplx w1 = w(z1);
  const cplx w2 = w(z2);
  if (!(w1.imag() > 0.0) || !(w2.imag() > 0.0)) {
    throw Error(ErrorCode::DomainExit, "map image left the half-plane");
  }
  return green_half_plane(HalfPlanePoint(w1), HalfPlanePoint(w2));
}

HalfPlanePoint strip_to_half_plane(cplx z) {
  if (!std::isfinite(z.real()) || !(z.imag() > 0.0) || !(z.imag() < M_PI)) {
    throw Error(ErrorCode::BoundaryInput, "point not in the open strip: " + show(z));
  }
  return HalfPlanePoint(std::tanh(0.5 * z));
}

cplx half_plane_to_strip(HalfPlanePoint w) {
  // 2 artanh(w) = log((1+w)/(1-w)); the Möbius factor keeps the argument in the half-plane.
  const cplx v = w.value();
  return std::log((1.0 + v) / (1.0 - v));
}

cplx StripMap::operator()(cplx z) const { return strip_to_half_plane(z).value(); }

cplx StripMap::derivative(cplx z) const {
  const cplx c = std::cosh(0.5 * z);
  return 0.5 / (c * c);
}

TriangleSpec TriangleSpec::from_vertices(cplx A, cplx B, cplx C) {
  TriangleSpec t;
  t.A = A;
  t.B = B;
  t.C = C;
  t.angleA = std::abs(std::arg((C - A) / (B - A)));
  t.angleB = std::abs(std::arg((A - B) / (C - B)));
  t.angleC = std::abs(std::arg((B - C) / (A - C)));
  return t;
}

namespace {
double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }
}  // namespace

Barycentric barycentric(cplx p, const TriangleSpec& tri, double eps_tri) {
  const double area = cross(tri.B - tri.A, tri.C - tri.A);
  if (area == 0.0) throw Error(ErrorCode::ParameterRange, "degenerate triangle");
  double a = cross(tri.B - p, tri.C - p) / area;
  double b = cross(tri.C - p, tri.A - p) / area;
  double c = cross(tri.A - p, tri.B - p) / area;
  if (a < -eps_tri || b < -eps_tri || c < -eps_tri) {
    throw Error(ErrorCode::OutsideTriangle, "point outside triangle: " + show(p));
  }
  const double s = a + b + c;
  a /= s;
  b /= s;
  c = 1.0 - a - b;
  return {a, b, c};
}

}  // namespace slitflow::conformal
