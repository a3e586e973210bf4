#pragma once

#include <array>
#include <complex>
#include <memory>

namespace slitflow {

using cplx = std::complex<double>;

namespace conformal {

/// A point of the open upper half-plane.
class HalfPlanePoint {
 public:
  /// Throws BoundaryInput unless z is finite with Im z > 0.
  explicit HalfPlanePoint(cplx z);
  cplx value() const { return z_; }
  operator cplx() const { return z_; }

 private:
  cplx z_;
};

/// Green's function of the half-plane, log|z1 - conj z2| - log|z1 - z2|.
double green_half_plane(HalfPlanePoint z1, HalfPlanePoint z2);

/// Same kernel without validation, for inner loops on trusted data.
double green_half_plane_raw(cplx z1, cplx z2);

/// Holomorphic map with derivative; the domain predicate guards evaluation.
class ConformalMap {
 public:
  virtual ~ConformalMap() = default;
  virtual cplx operator()(cplx z) const = 0;
  virtual cplx derivative(cplx z) const = 0;
  virtual bool in_domain(cplx z) const { return z.imag() > 0.0; }
};

class IdentityMap final : public ConformalMap {
 public:
  cplx operator()(cplx z) const override { return z; }
  cplx derivative(cplx) const override { return 1.0; }
};

/// Real Möbius map z -> (az+b)/(cz+d), normalized to ad - bc = 1.
class MobiusAut final : public ConformalMap {
 public:
  MobiusAut() = default;
  /// Throws ParameterRange unless ad - bc > 0.
  MobiusAut(double a, double b, double c, double d);

  static MobiusAut identity() { return {}; }
  static MobiusAut scaling(double s);
  static MobiusAut translation(double t);

  cplx operator()(cplx z) const override;
  cplx derivative(cplx z) const override;

  MobiusAut inverse() const;
  /// (this ∘ other)(z) = this(other(z)).
  MobiusAut compose(const MobiusAut& other) const;

  const std::array<double, 4>& coeffs() const { return m_; }

 private:
  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

/// w ∘ v for two conformal maps.
class ComposedMap final : public ConformalMap {
 public:
  ComposedMap(std::shared_ptr<const ConformalMap> outer, std::shared_ptr<const ConformalMap> inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}
  cplx operator()(cplx z) const override { return (*outer_)((*inner_)(z)); }
  cplx derivative(cplx z) const override {
    return outer_->derivative((*inner_)(z)) * inner_->derivative(z);
  }
  bool in_domain(cplx z) const override {
    return inner_->in_domain(z) && outer_->in_domain((*inner_)(z));
  }

 private:
  std::shared_ptr<const ConformalMap> outer_;
  std::shared_ptr<const ConformalMap> inner_;
};

/// Green's function of the domain of w, G_H(w(z1), w(z2)).
double green_pullback(const ConformalMap& w, cplx z1, cplx z2);

/// tanh(z/2): strip {0 < Im z < π} onto the half-plane, with -∞, 0, +∞ sent to -1, 0, 1.
HalfPlanePoint strip_to_half_plane(cplx z);
/// Inverse of strip_to_half_plane.
cplx half_plane_to_strip(HalfPlanePoint w);

class StripMap final : public ConformalMap {
 public:
  cplx operator()(cplx z) const override;
  cplx derivative(cplx z) const override;
  bool in_domain(cplx z) const override { return z.imag() > 0.0 && z.imag() < M_PI; }
};

/// Triangle with labeled vertices and interior angles.
struct TriangleSpec {
  double angleA = 0.0;
  double angleB = 0.0;
  double angleC = 0.0;
  cplx A;
  cplx B;
  cplx C;

  /// Angles recomputed from the vertex positions.
  static TriangleSpec from_vertices(cplx A, cplx B, cplx C);
  cplx centroid() const { return (A + B + C) / 3.0; }
};

struct Barycentric {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Barycentric coordinates; throws OutsideTriangle beyond the tolerance band.
Barycentric barycentric(cplx point, const TriangleSpec& tri, double eps_tri = 1e-9);

/// Schwarz-Christoffel map of the strip onto a triangle, f(Z) = h(e^Z) with
/// h'(ζ) = C ζ^(-1+2(1+α)/κ) (ζ-1)^(-4/κ).
///
/// Normalization: A = h(1) = f(0) at the origin, B = h(∞) = f(+∞) at 1,
/// C = h(0) = f(-∞) in the upper half-plane.
class ScMap {
 public:
  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }
  const TriangleSpec& triangle() const { return tri_; }
  double normalization() const { return norm_; }
  double exponent_zero() const { return e0_; }
  double exponent_one() const { return e1_; }

  /// h'(ζ) on the closed upper half-plane minus {0, 1}.
  cplx h_prime(cplx zeta) const;
  /// h(ζ) by quadrature of h' from the nearest prevertex.
  cplx h(cplx zeta) const;
  /// f(Z) = h(e^Z) on the strip.
  cplx f(cplx strip_point) const;

 private:
  friend ScMap sc_map_build(double kappa, double alpha);
  double kappa_ = 0.0;
  double alpha_ = 0.0;
  double e0_ = 0.0;
  double e1_ = 0.0;
  double norm_ = 1.0;
  TriangleSpec tri_;
};

/// Throws ParameterRange unless κ > 4 and |α| < 1.
ScMap sc_map_build(double kappa, double alpha);

/// Conformal map of an axis-aligned rectangle onto the half-plane via
/// Jacobi sn; the bottom side lands on [-1, 1].
class RectangleMap final : public ConformalMap {
 public:
  RectangleMap(double x0, double y0, double width, double height);
  cplx operator()(cplx z) const override;
  cplx derivative(cplx z) const override;
  bool in_domain(cplx z) const override;
  double modulus() const { return k_; }

 private:
  double x0_, y0_, w_, h_;
  double k_ = 0.0;
  double scale_ = 0.0;
};

/// Jacobi sn(u, k) for complex argument.
cplx jacobi_sn(cplx u, double k);

}  // namespace conformal
}  // namespace slitflow
