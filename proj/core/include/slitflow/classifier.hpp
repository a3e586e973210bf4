#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <string>
#include <vector>

#include "slitflow/conformal.hpp"
#include "slitflow/vector_fields.hpp"

namespace slitflow::classify {

using Rational = boost::multiprecision::cpp_rational;
using fields::FieldCoeffs;

/// Coupling constants fixed by κ: a = √(2/κ), background charge 𝔟 = √(κ/8) - √(2/κ).
struct CftParams {
  double kappa = 0.0;
  double a = 0.0;
  double bg = 0.0;
  double delta = 0.0;
  double central_charge = 0.0;

  static CftParams from_kappa(double kappa, double delta = 0.0);
};

enum class Family { ChordalDrift, ParabolicBeta, DipolarDrift, HyperbolicBeta, Radial6Drift, Custom };
const char* to_string(Family f);

/// One slit flow together with its coupling data.
struct FlowModel {
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  FieldCoeffs b = FieldCoeffs::b_field(0, 0, 0);
  FieldCoeffs sigma = FieldCoeffs::sigma_field(0, 0);
  Family family = Family::Custom;
  /// +1 / -1 for the two hyperbolic-β branches, 0 otherwise.
  int sign = 0;
  bool degenerate = false;
  CftParams cft;

  static FlowModel custom(double kappa, double alpha, double beta, const FieldCoeffs& b,
                          const FieldCoeffs& sigma);
};

/// Convenience constructors for the standard normalizations.
FlowModel chordal_model(double kappa, double alpha);
FlowModel dipolar_model(double kappa, double alpha);

// ---- linear system for (b₋₁, b₀, b₁) -------------------------------------

enum class SolveStatus { Unique, Family, Inconsistent };
const char* to_string(SolveStatus s);

/// Coefficient matrix and right-hand side of the 4x3 system; γ = β√κ.
template <class T>
struct LinearSystem {
  std::array<std::array<T, 3>, 4> m;
  std::array<T, 4> rhs;
};

template <class T>
LinearSystem<T> build_system(const T& kappa, const T& s0, const T& s1, const T& alpha, const T& gamma) {
  LinearSystem<T> s;
  const T four(4), six(6), eight(8), two(2), zero(0), one(1), k24(24);
  s.m[0] = {one, zero, zero};
  s.rhs[0] = -alpha + four * s0;
  s.m[1] = {two * alpha + (kappa - four) * s0, -(kappa - eight), zero};
  s.rhs[1] = -two * gamma + two * kappa * s0 * s0 - two * kappa * s1 + k24 * s1;
  s.m[2] = {(kappa - four) * s1, alpha, -(kappa - six)};
  s.rhs[2] = -gamma * s0 + two * kappa * s0 * s1;
  s.m[3] = {zero, (kappa - four) * s1, -((kappa - four) * s0 - two * alpha)};
  s.rhs[3] = (-two * gamma + two * kappa * s1) * s1;
  return s;
}

template <class T>
std::array<T, 4> system_residuals(const LinearSystem<T>& s, const std::array<T, 3>& b) {
  std::array<T, 4> r;
  for (int i = 0; i < 4; ++i) r[i] = s.m[i][0] * b[0] + s.m[i][1] * b[1] + s.m[i][2] * b[2] - s.rhs[i];
  return r;
}

struct SystemSolution {
  SolveStatus status = SolveStatus::Inconsistent;
  std::array<double, 3> b{};
  std::vector<std::array<double, 3>> nullspace;
  std::array<double, 4> residuals{};
  bool degenerate_kappa = false;
};

/// Floating-point solve with rank analysis; degenerate κ ∈ {6, 8} flagged.
SystemSolution solve_system(double kappa, double s0, double s1, double alpha, double beta);

struct ExactSolution {
  SolveStatus status = SolveStatus::Inconsistent;
  std::array<Rational, 3> b{};
  std::vector<std::array<Rational, 3>> nullspace;
  std::array<Rational, 4> residuals{};
};

/// Exact rational solve; γ = β√κ is the rational parameter.
ExactSolution solve_system_exact(const Rational& kappa, const Rational& s0, const Rational& s1,
                                 const Rational& alpha, const Rational& gamma);

// ---- the coupled families --------------------------------------------------

struct ExactCoeffs {
  std::array<Rational, 3> b;
  std::array<Rational, 2> sigma;
  Rational alpha;
  Rational gamma;
};

/// Symbolic description of one family at a fixed κ.
struct FamilySpec {
  Family kind = Family::Custom;
  int sign = 0;
  std::string label;
  /// "alpha" or "beta": the family's continuous parameter.
  std::string parameter;
  /// Extra free coefficients at degenerate κ (e.g. "b1").
  std::vector<std::string> extra;
  bool degenerate = false;
  std::string note;
  std::string u_tag;

  /// Exact coefficients; `param` is α, or γ = β√κ for β-families.
  ExactCoeffs exact(const Rational& kappa, const Rational& param,
                    std::span<const Rational> extra_values = {}) const;
  /// Floating model; `param` is α, or β for β-families.
  FlowModel instantiate(double kappa, double param, std::span<const double> extra_values = {}) const;
};

/// Families (1)-(5); the radial family only at κ = 6.
std::vector<FamilySpec> enumerate_families(double kappa);

// ---- harmonic observable u = Im U ------------------------------------------

/// coef · Log(orient · (z - root)), principal branch.
struct LogTerm {
  cplx coef;
  cplx root;
  double orient = 1.0;
};

/// coef / (z - root)^order
struct PoleTerm {
  cplx coef;
  cplx root;
  int order = 1;
};

/// u = Im U with U = Σ log terms + Σ pole terms + c₀ + c₁ z, a pre-pre-Schwarzian of order μ.
class HarmonicU {
 public:
  std::string tag;
  double mu = 0.0;
  std::vector<LogTerm> logs;
  std::vector<PoleTerm> poles;
  cplx c0 = 0.0;
  cplx c1 = 0.0;

  double operator()(cplx z) const;
  cplx U(cplx z) const;
  cplx dU(cplx z) const;
  cplx d2U(cplx z) const;
};

/// Closed form for the five families, partial fractions otherwise.
/// Throws BranchObstruction when no continuous branch exists on the half-plane.
HarmonicU build_u(const FlowModel& model);

/// Partial-fraction antiderivative of U' = -a(2+αz)/(zσ) + 2𝔟σ'/σ.
HarmonicU build_u_generic(const FlowModel& model);

/// U' straight from the model, independent of any HarmonicU.
cplx observable_derivative(const FlowModel& model, cplx z);

/// u(z) - u(z_ref) by Gauss-Kronrod quadrature of Im U' along the segment.
double u_increment_by_quadrature(const FlowModel& model, cplx z_ref, cplx z);

struct ResidualReport {
  std::vector<double> residuals;
  std::size_t skipped = 0;
  double max = 0.0;
};

/// Per-sample |(-L_b + (κ/2) L_σ²) u| through U', U''.
ResidualReport check_annihilation(const FlowModel& model, const HarmonicU& u,
                                  std::span<const cplx> samples);

/// L_b u and L_σ² u separately, general (U-based) route.
double lie_b_of_u(const FlowModel& model, const HarmonicU& u, cplx z);
double lie_sigma_of_u(const FlowModel& model, const HarmonicU& u, cplx z);
double lie_sigma2_of_u(const FlowModel& model, const HarmonicU& u, cplx z);

/// Residual of the b-σ relation; samples with z(αz+2) ≈ 0 are skipped.
ResidualReport check_bsigma(const FlowModel& model, std::span<const cplx> samples);

/// One JSON object per family, with numeric parameters when given.
std::string family_catalogue_json(double kappa, double alpha, double beta);

}  // namespace slitflow::classify
