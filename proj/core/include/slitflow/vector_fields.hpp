#pragma once

#include <array>
#include <functional>
#include <span>
#include <variant>

#include "slitflow/conformal.hpp"

namespace slitflow::fields {

enum class FieldKind { B, Sigma };

/// Laurent data v(z) = c[0]/z + c[1] + c[2] z + c[3] z² with real coefficients.
struct LaurentField {
  std::array<double, 4> c{};

  cplx eval(cplx z) const;
  cplx prime(cplx z) const;
  cplx second(cplx z) const;
};

/// Normalized driving fields:
///   b(z) = -2/z - b₋₁ - b₀ z - b₁ z²,   σ(z) = -1 - σ₀ z - σ₁ z².
class FieldCoeffs {
 public:
  static FieldCoeffs b_field(double bm1, double b0, double b1);
  static FieldCoeffs sigma_field(double s0, double s1);

  FieldKind kind() const { return kind_; }
  bool is_b() const { return kind_ == FieldKind::B; }

  double bm1() const { return k_[0]; }
  double b0() const { return k_[1]; }
  double b1() const { return k_[2]; }
  double s0() const { return k_[1]; }
  double s1() const { return k_[2]; }
  /// Raw slots (b₋₁, b₀, b₁) or (0, σ₀, σ₁).
  const std::array<double, 3>& slots() const { return k_; }

  LaurentField laurent() const;

  /// Throws Pole at z = 0 for b-fields.
  cplx eval(cplx z) const;
  cplx prime(cplx z) const;
  cplx second(cplx z) const;

  /// Reads a Laurent field back into normalized form; ShapeViolation otherwise.
  static FieldCoeffs from_laurent(const LaurentField& f, FieldKind kind, double tol = 1e-12);

 private:
  FieldCoeffs(FieldKind k, std::array<double, 3> v) : kind_(k), k_(v) {}
  FieldKind kind_ = FieldKind::B;
  std::array<double, 3> k_{};
};

cplx eval_field(const FieldCoeffs& f, cplx z);
cplx eval_field_prime(const FieldCoeffs& f, cplx z);
cplx eval_field_second(const FieldCoeffs& f, cplx z);

/// Itô drift of the Stratonovich flow: -b(z) + (κ/2) σ(z) σ'(z).
cplx ito_drift(const FieldCoeffs& b, const FieldCoeffs& sigma, double kappa, cplx z);

/// Holomorphic vector field together with its derivative.
struct VectorField {
  std::function<cplx(cplx)> value;
  std::function<cplx(cplx)> derivative;

  static VectorField from(const FieldCoeffs& f);
  static VectorField from(const LaurentField& f);
  /// ℓ_n = -z^(n+1).
  static VectorField ell(int n);
};

/// Transformation rule of a conformal field at one node.
struct ConformalWeight {
  enum class Mode { Differential, PrePreSchwarzian };
  Mode mode = Mode::Differential;
  cplx lambda = 0.0;
  cplx lambda_star = 0.0;
  cplx mu = 0.0;
  /// For pre-pre-Schwarzian forms sampled through their imaginary part.
  bool imaginary_part = false;

  static ConformalWeight differential(cplx lambda, cplx lambda_star);
  static ConformalWeight pre_pre_schwarzian(cplx mu, bool imaginary_part = false);
};

using ScalarField = std::function<cplx(std::span<const cplx>)>;

struct FdOptions {
  double rel_step = 1e-5;
  double tol = 1e-6;
};

/// Multi-node Lie derivative by central differences with a Richardson check.
///
/// Differential nodes contribute (λ v' + λ* conj v') f; pre-pre-Schwarzian
/// nodes contribute μ v' (or Im(μ v') for imaginary-part forms).
/// Throws StepDegeneration when the h and h/2 estimates differ by more than tol.
cplx lie_derivative(const VectorField& v, const ScalarField& f,
                    std::span<const ConformalWeight> weights, std::span<const cplx> nodes,
                    const FdOptions& opt = {});

/// Selector for the closed-form Lie derivative of the Green's function.
struct EllN {
  int n;
};
using GreenField = std::variant<EllN, FieldCoeffs>;

/// Closed form of L_v G_H(z1, z2) via the ℓ_n expansion of v.
double lie_green_closed(const GreenField& v, cplx z1, cplx z2);

enum class SigmaTag { Parabolic, Hyperbolic, Elliptic };
const char* to_string(SigmaTag t);

struct SigmaClass {
  SigmaTag tag = SigmaTag::Parabolic;
  double discriminant = 0.0;
};

SigmaClass sigma_classify(const FieldCoeffs& sigma);

/// Push-forward φ_* v(z) = φ'(φ⁻¹(z)) v(φ⁻¹(z)) on Laurent data.
/// A pole at 0 may only be carried by maps that fix 0 (ShapeViolation otherwise).
LaurentField pushforward_raw(const conformal::MobiusAut& phi, const LaurentField& v);

/// Push-forward that must land on a normalized field of the same kind.
FieldCoeffs pushforward(const conformal::MobiusAut& phi, const FieldCoeffs& v);

}  // namespace slitflow::fields
