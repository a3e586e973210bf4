#include "slitflow/vector_fields.hpp"

#include <cmath>
#include <vector>

#include "slitflow/error.hpp"

namespace slitflow::fields {

cplx LaurentField::eval(cplx z) const {
  cplx v = c[1] + z * (c[2] + z * c[3]);
  if (c[0] != 0.0) v += c[0] / z;
  return v;
}

cplx LaurentField::prime(cplx z) const {
  cplx v = c[2] + 2.0 * c[3] * z;
  if (c[0] != 0.0) v -= c[0] / (z * z);
  return v;
}

cplx LaurentField::second(cplx z) const {
  cplx v = 2.0 * c[3];
  if (c[0] != 0.0) v += 2.0 * c[0] / (z * z * z);
  return v;
}

FieldCoeffs FieldCoeffs::b_field(double bm1, double b0, double b1) {
  return FieldCoeffs(FieldKind::B, {bm1, b0, b1});
}

FieldCoeffs FieldCoeffs::sigma_field(double s0, double s1) {
  return FieldCoeffs(FieldKind::Sigma, {0.0, s0, s1});
}

LaurentField FieldCoeffs::laurent() const {
  if (is_b()) return {{-2.0, -k_[0], -k_[1], -k_[2]}};
  return {{0.0, -1.0, -k_[1], -k_[2]}};
}

cplx FieldCoeffs::eval(cplx z) const {
  if (is_b()) {
    if (z == cplx(0.0)) throw Error(ErrorCode::Pole, "b-field evaluated at 0");
    return -2.0 / z - k_[0] - z * (k_[1] + z * k_[2]);
  }
  return -1.0 - z * (k_[1] + z * k_[2]);
}

cplx FieldCoeffs::prime(cplx z) const {
  if (is_b()) {
    if (z == cplx(0.0)) throw Error(ErrorCode::Pole, "b-field evaluated at 0");
    return 2.0 / (z * z) - k_[1] - 2.0 * k_[2] * z;
  }
  return -k_[1] - 2.0 * k_[2] * z;
}

cplx FieldCoeffs::second(cplx z) const {
  if (is_b()) {
    if (z == cplx(0.0)) throw Error(ErrorCode::Pole, "b-field evaluated at 0");
    return -4.0 / (z * z * z) - 2.0 * k_[2];
  }
  return -2.0 * k_[2];
}

FieldCoeffs FieldCoeffs::from_laurent(const LaurentField& f, FieldKind kind, double tol) {
  const double scale = std::max({1.0, std::abs(f.c[0]), std::abs(f.c[1])});
  if (kind == FieldKind::B) {
    if (std::abs(f.c[0] + 2.0) > tol * scale) {
      throw Error(ErrorCode::ShapeViolation, "b-field needs residue -2 at 0");
    }
    return b_field(-f.c[1], -f.c[2], -f.c[3]);
  }
  if (std::abs(f.c[0]) > tol * scale || std::abs(f.c[1] + 1.0) > tol * scale) {
    throw Error(ErrorCode::ShapeViolation, "sigma-field needs sigma(0) = -1 and no pole");
  }
  return sigma_field(-f.c[2], -f.c[3]);
}

cplx eval_field(const FieldCoeffs& f, cplx z) { return f.eval(z); }
cplx eval_field_prime(const FieldCoeffs& f, cplx z) { return f.prime(z); }
cplx eval_field_second(const FieldCoeffs& f, cplx z) { return f.second(z); }

cplx ito_drift(const FieldCoeffs& b, const FieldCoeffs& sigma, double kappa, cplx z) {
  return -b.eval(z) + 0.5 * kappa * sigma.eval(z) * sigma.prime(z);
}

VectorField VectorField::from(const FieldCoeffs& f) {
  return {[f](cplx z) { return f.eval(z); }, [f](cplx z) { return f.prime(z); }};
}

VectorField VectorField::from(const LaurentField& f) {
  return {[f](cplx z) { return f.eval(z); }, [f](cplx z) { return f.prime(z); }};
}

VectorField VectorField::ell(int n) {
  return {[n](cplx z) { return -std::pow(z, n + 1); },
          [n](cplx z) { return n == -1 ? cplx(0.0) : -double(n + 1) * std::pow(z, n); }};
}

ConformalWeight ConformalWeight::differential(cplx lambda, cplx lambda_star) {
  ConformalWeight w;
  w.mode = Mode::Differential;
  w.lambda = lambda;
  w.lambda_star = lambda_star;
  return w;
}

ConformalWeight ConformalWeight::pre_pre_schwarzian(cplx mu, bool imaginary_part) {
  ConformalWeight w;
  w.mode = Mode::PrePreSchwarzian;
  w.mu = mu;
  w.imaginary_part = imaginary_part;
  return w;
}

namespace {

// Σ_k v(z_k) ∂_k f + conj(v(z_k)) ∂̄_k f with step factor `shrink`.
cplx transport_term(const std::vector<cplx>& vals, const ScalarField& f,
                    std::span<const cplx> nodes, double rel, double shrink) {
  std::vector<cplx> pts(nodes.begin(), nodes.end());
  cplx total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double h = rel * std::max(1.0, std::abs(nodes[k])) * shrink;
    const cplx z = nodes[k];
    pts[k] = z + h;
    const cplx fxp = f(pts);
    pts[k] = z - h;
    const cplx fxm = f(pts);
    pts[k] = z + cplx(0.0, h);
    const cplx fyp = f(pts);
    pts[k] = z - cplx(0.0, h);
    const cplx fym = f(pts);
    pts[k] = z;
    const cplx dx = (fxp - fxm) / (2.0 * h);
    const cplx dy = (fyp - fym) / (2.0 * h);
    const cplx d = 0.5 * (dx - cplx(0.0, 1.0) * dy);
    const cplx dbar = 0.5 * (dx + cplx(0.0, 1.0) * dy);
    total += vals[k] * d + std::conj(vals[k]) * dbar;
  }
  return total;
}

}  // namespace

cplx lie_derivative(const VectorField& v, const ScalarField& f,
                    std::span<const ConformalWeight> weights, std::span<const cplx> nodes,
                    const FdOptions& opt) {
  if (weights.size() != nodes.size()) {
    throw Error(ErrorCode::ParameterRange, "one weight per node required");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i] == nodes[j]) throw Error(ErrorCode::CoincidentPoints, "repeated node");
    }
  }
  std::vector<cplx> vals(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) vals[k] = v.value(nodes[k]);

  const cplx d1 = transport_term(vals, f, nodes, opt.rel_step, 1.0);
  const cplx d2 = transport_term(vals, f, nodes, opt.rel_step, 0.5);
  if (std::abs(d1 - d2) > opt.tol * std::max(1.0, std::abs(d2))) {
    throw Error(ErrorCode::StepDegeneration, "finite-difference estimates disagree");
  }
  cplx result = (4.0 * d2 - d1) / 3.0;

  const cplx f0 = f(nodes);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& w = weights[k];
    const cplx dv = v.derivative(nodes[k]);
    if (w.mode == ConformalWeight::Mode::Differential) {
      result += (w.lambda * dv + w.lambda_star * std::conj(dv)) * f0;
    } else if (w.imaginary_part) {
      result += (w.mu * dv).imag();
    } else {
      result += w.mu * dv;
    }
  }
  return result;
}

namespace {

// (x^m - y^m)/(x - y) for m in [-1, 3], without the cancelling subtraction.
cplx divided_power(int m, cplx x, cplx y) {
  switch (m) {
    case -1: return -1.0 / (x * y);
    case 0: return 0.0;
    case 1: return 1.0;
    case 2: return x + y;
    case 3: return x * x + x * y + y * y;
    default: break;
  }
  return (std::pow(x, m) - std::pow(y, m)) / (x - y);
}

double lie_green_ell(int n, cplx z1, cplx z2) {
  return (divided_power(n + 1, z1, z2) - divided_power(n + 1, z1, std::conj(z2))).real();
}

}  // namespace

double lie_green_closed(const GreenField& v, cplx z1, cplx z2) {
  const conformal::HalfPlanePoint p1(z1), p2(z2);
  const double scale = std::max({1.0, std::abs(z1), std::abs(z2)});
  if (std::abs(z1 - z2) <= 1e-14 * scale) {
    throw Error(ErrorCode::CoincidentPoints, "Lie derivative of G at coincident points");
  }
  if (const auto* e = std::get_if<EllN>(&v)) return lie_green_ell(e->n, z1, z2);
  const auto& f = std::get<FieldCoeffs>(v);
  // b = 2ℓ₋₂ + b₋₁ℓ₋₁ + b₀ℓ₀ + b₁ℓ₁,  σ = ℓ₋₁ + σ₀ℓ₀ + σ₁ℓ₁.
  const auto& k = f.slots();
  double total = f.is_b() ? 2.0 * lie_green_ell(-2, z1, z2) + k[0] * lie_green_ell(-1, z1, z2)
                          : lie_green_ell(-1, z1, z2);
  total += k[1] * lie_green_ell(0, z1, z2) + k[2] * lie_green_ell(1, z1, z2);
  return total;
}

const char* to_string(SigmaTag t) {
  switch (t) {
    case SigmaTag::Parabolic: return "parabolic";
    case SigmaTag::Hyperbolic: return "hyperbolic";
    case SigmaTag::Elliptic: return "elliptic";
  }
  return "?";
}

SigmaClass sigma_classify(const FieldCoeffs& sigma) {
  const double s0 = sigma.s0(), s1 = sigma.s1();
  const double D = s0 * s0 - 4.0 * s1;
  SigmaClass out;
  out.discriminant = D;
  if (s1 != 0.0) {
    const double tol = 1e-14 * std::max(s0 * s0, std::abs(4.0 * s1));
    if (std::abs(D) <= tol) {
      out.tag = SigmaTag::Parabolic;
    } else {
      out.tag = D > 0.0 ? SigmaTag::Hyperbolic : SigmaTag::Elliptic;
    }
  } else {
    out.tag = s0 != 0.0 ? SigmaTag::Hyperbolic : SigmaTag::Parabolic;
  }
  return out;
}

namespace {

using Poly = std::array<double, 4>;  // ascending powers, degree ≤ 3

Poly mul(const Poly& p, const Poly& q) {
  Poly r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) r[i + j] += p[i] * q[j];
  return r;
}

}  // namespace

LaurentField pushforward_raw(const conformal::MobiusAut& phi, const LaurentField& v) {
  // With det φ = 1 and ψ = φ⁻¹: φ'(ψ(z)) = (a - cz)², so
  // φ_* v = Σ c_n (dz - b)^n (a - cz)^(2-n).
  const auto [a, b, c, d] = phi.coeffs();
  const Poly lin_num{-b, d, 0, 0};  // dz - b
  const Poly lin_den{a, -c, 0, 0};  // a - cz
  LaurentField out;
  const Poly p0 = mul(lin_den, lin_den);
  const Poly p1 = mul(lin_num, lin_den);
  const Poly p2 = mul(lin_num, lin_num);
  for (int k = 0; k < 3; ++k) {
    out.c[k + 1] += v.c[1] * p0[k] + v.c[2] * p1[k] + v.c[3] * p2[k];
  }
  if (v.c[0] != 0.0) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (std::abs(b) > 1e-14 * scale) {
      throw Error(ErrorCode::ShapeViolation, "push-forward moves the pole away from 0");
    }
    // (a - cz)³ / (dz)
    const Poly cube = mul(p0, lin_den);
    out.c[0] += v.c[0] * cube[0] / d;
    out.c[1] += v.c[0] * cube[1] / d;
    out.c[2] += v.c[0] * cube[2] / d;
    out.c[3] += v.c[0] * cube[3] / d;
  }
  return out;
}

FieldCoeffs pushforward(const conformal::MobiusAut& phi, const FieldCoeffs& v) {
  return FieldCoeffs::from_laurent(pushforward_raw(phi, v.laurent()), v.kind());
}

}  // namespace slitflow::fields
