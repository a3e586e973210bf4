#include "slitflow/classifier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <json.hpp>

#include "slitflow/error.hpp"

namespace slitflow::classify {

CftParams CftParams::from_kappa(double kappa, double delta) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::ParameterRange, "kappa must be positive");
  CftParams p;
  p.kappa = kappa;
  p.a = std::sqrt(2.0 / kappa);
  p.bg = std::sqrt(kappa / 8.0) - std::sqrt(2.0 / kappa);
  p.delta = delta;
  p.central_charge = 1.0 - 12.0 * p.bg * p.bg;
  return p;
}

const char* to_string(Family f) {
  switch (f) {
    case Family::ChordalDrift: return "chordal-drift";
    case Family::ParabolicBeta: return "parabolic-beta";
    case Family::DipolarDrift: return "dipolar-drift";
    case Family::HyperbolicBeta: return "hyperbolic-beta";
    case Family::Radial6Drift: return "radial6-drift";
    case Family::Custom: return "custom";
  }
  return "?";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Unique: return "unique";
    case SolveStatus::Family: return "family";
    case SolveStatus::Inconsistent: return "inconsistent";
  }
  return "?";
}

FlowModel FlowModel::custom(double kappa, double alpha, double beta, const FieldCoeffs& b,
                            const FieldCoeffs& sigma) {
  if (!b.is_b() || sigma.is_b()) throw Error(ErrorCode::ParameterRange, "field kinds swapped");
  FlowModel m;
  m.kappa = kappa;
  m.alpha = alpha;
  m.beta = beta;
  m.b = b;
  m.sigma = sigma;
  m.family = Family::Custom;
  m.cft = CftParams::from_kappa(kappa);
  m.cft.delta = alpha * m.cft.a;
  return m;
}

namespace {
bool near(double x, double y) { return std::abs(x - y) < 1e-12; }
}  // namespace

SystemSolution solve_system(double kappa, double s0, double s1, double alpha, double beta) {
  const auto sys = build_system<double>(kappa, s0, s1, alpha, beta * std::sqrt(kappa));
  Eigen::Matrix<double, 4, 3> M;
  Eigen::Vector4d r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) M(i, j) = sys.m[i][j];
    r(i) = sys.rhs[i];
  }
  Eigen::Matrix4d aug;
  aug << M, r;
  const double scale = std::max(1.0, aug.cwiseAbs().maxCoeff());
  Eigen::FullPivLU<Eigen::Matrix<double, 4, 3>> lu(M);
  lu.setThreshold(1e-12 * scale);
  Eigen::FullPivLU<Eigen::Matrix4d> lu_aug(aug);
  lu_aug.setThreshold(1e-12 * scale);

  SystemSolution out;
  out.degenerate_kappa = near(kappa, 6.0) || near(kappa, 8.0);
  Eigen::Vector3d x = M.colPivHouseholderQr().solve(r);
  for (int j = 0; j < 3; ++j) out.b[j] = x(j);
  out.residuals = system_residuals(sys, out.b);
  if (lu.rank() < lu_aug.rank()) {
    out.status = SolveStatus::Inconsistent;
    return out;
  }
  if (lu.rank() == 3) {
    out.status = SolveStatus::Unique;
  } else {
    out.status = SolveStatus::Family;
    const Eigen::MatrixXd K = lu.kernel();
    for (int c = 0; c < K.cols(); ++c) out.nullspace.push_back({K(0, c), K(1, c), K(2, c)});
  }
  return out;
}

ExactSolution solve_system_exact(const Rational& kappa, const Rational& s0, const Rational& s1,
                                 const Rational& alpha, const Rational& gamma) {
  const auto sys = build_system<Rational>(kappa, s0, s1, alpha, gamma);
  std::array<std::array<Rational, 4>, 4> a;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) a[i][j] = sys.m[i][j];
    a[i][3] = sys.rhs[i];
  }
  // Reduced row echelon form over the rationals.
  std::array<int, 3> pivot_row{-1, -1, -1};
  int row = 0;
  for (int col = 0; col < 3 && row < 4; ++col) {
    int p = -1;
    for (int i = row; i < 4; ++i) {
      if (a[i][col] != 0) {
        p = i;
        break;
      }
    }
    if (p < 0) continue;
    std::swap(a[row], a[p]);
    const Rational inv = Rational(1) / a[row][col];
    for (auto& v : a[row]) v *= inv;
    for (int i = 0; i < 4; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (int j = 0; j < 4; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_row[col] = row;
    ++row;
  }
  ExactSolution out;
  for (int i = row; i < 4; ++i) {
    if (a[i][3] != 0) {
      out.status = SolveStatus::Inconsistent;
      out.residuals = system_residuals(sys, out.b);
      return out;
    }
  }
  for (int col = 0; col < 3; ++col) {
    out.b[col] = pivot_row[col] >= 0 ? a[pivot_row[col]][3] : Rational(0);
  }
  for (int free = 0; free < 3; ++free) {
    if (pivot_row[free] >= 0) continue;
    std::array<Rational, 3> v{};
    v[free] = 1;
    for (int col = 0; col < 3; ++col) {
      if (pivot_row[col] >= 0) v[col] = -a[pivot_row[col]][free];
    }
    out.nullspace.push_back(v);
  }
  out.status = out.nullspace.empty() ? SolveStatus::Unique : SolveStatus::Family;
  out.residuals = system_residuals(sys, out.b);
  return out;
}

// ---- families ---------------------------------------------------------------

ExactCoeffs FamilySpec::exact(const Rational& kappa, const Rational& param,
                              std::span<const Rational> extra_values) const {
  if (extra_values.size() != extra.size()) {
    throw Error(ErrorCode::ParameterRange, "wrong number of free coefficients for " + label);
  }
  ExactCoeffs c;
  const Rational quarter(1, 4), half(1, 2);
  switch (kind) {
    case Family::ChordalDrift:
      c.alpha = param;
      c.gamma = param * param;
      c.sigma = {0, 0};
      c.b = {-param, 0, 0};
      break;
    case Family::ParabolicBeta:
      c.alpha = 0;
      c.sigma = {0, 0};
      if (kappa == 8) {
        c.gamma = 0;
        c.b = {0, extra_values[0], 0};
      } else {
        c.gamma = param;
        c.b = {0, 2 * param / (kappa - 8), 0};
        if (kappa == 6) c.b[2] = extra_values[0];
      }
      break;
    case Family::DipolarDrift:
      c.alpha = param;
      c.gamma = param * param - 1;
      c.sigma = {0, -quarter};
      c.b = {-param, -half, param * quarter};
      break;
    case Family::HyperbolicBeta: {
      const Rational s(sign);
      c.alpha = s * (kappa - 6) / 2;
      c.sigma = {0, -quarter};
      if (kappa == 8) {
        c.gamma = 0;
        c.b = {-c.alpha, extra_values[0], c.alpha * (extra_values[0] + 1) / 2};
      } else {
        c.gamma = param;
        const Rational g8 = param / (kappa - 8);
        c.b = {-c.alpha, (3 - kappa) / 2 + 2 * g8, -s * (kappa - 2 - 8 * g8) / 8};
        if (kappa == 6) c.b[2] = extra_values[0];
      }
      break;
    }
    case Family::Radial6Drift:
      c.alpha = param;
      c.gamma = 1 + param * param;
      c.sigma = {0, quarter};
      c.b = {-param, half, -param * quarter};
      break;
    case Family::Custom:
      throw Error(ErrorCode::ParameterRange, "custom models have no family formula");
  }
  return c;
}

FlowModel FamilySpec::instantiate(double kappa, double param, std::span<const double> extra_values) const {
  if (extra_values.size() != extra.size()) {
    throw Error(ErrorCode::ParameterRange, "wrong number of free coefficients for " + label);
  }
  FlowModel m;
  m.kappa = kappa;
  m.family = kind;
  m.sign = sign;
  m.degenerate = degenerate;
  const double sk = std::sqrt(kappa);
  const double x0 = extra_values.empty() ? 0.0 : extra_values[0];
  switch (kind) {
    case Family::ChordalDrift:
      m.alpha = param;
      m.beta = param * param / sk;
      m.sigma = FieldCoeffs::sigma_field(0, 0);
      m.b = FieldCoeffs::b_field(-param, 0, 0);
      break;
    case Family::ParabolicBeta:
      m.alpha = 0.0;
      m.sigma = FieldCoeffs::sigma_field(0, 0);
      if (near(kappa, 8.0)) {
        m.beta = 0.0;
        m.b = FieldCoeffs::b_field(0, x0, 0);
      } else {
        m.beta = param;
        m.b = FieldCoeffs::b_field(0, 2.0 * param * sk / (kappa - 8.0), near(kappa, 6.0) ? x0 : 0.0);
      }
      break;
    case Family::DipolarDrift:
      m.alpha = param;
      m.beta = (param * param - 1.0) / sk;
      m.sigma = FieldCoeffs::sigma_field(0, -0.25);
      m.b = FieldCoeffs::b_field(-param, -0.5, 0.25 * param);
      break;
    case Family::HyperbolicBeta: {
      const double s = sign;
      m.alpha = s * (kappa - 6.0) / 2.0;
      m.sigma = FieldCoeffs::sigma_field(0, -0.25);
      if (near(kappa, 8.0)) {
        m.beta = 0.0;
        m.b = FieldCoeffs::b_field(-m.alpha, x0, m.alpha * (x0 + 1.0) / 2.0);
      } else {
        m.beta = param;
        const double g8 = param * sk / (kappa - 8.0);
        const double b1 = near(kappa, 6.0) ? x0 : -s * (kappa - 2.0 - 8.0 * g8) / 8.0;
        m.b = FieldCoeffs::b_field(-m.alpha, (3.0 - kappa) / 2.0 + 2.0 * g8, b1);
      }
      break;
    }
    case Family::Radial6Drift:
      m.alpha = param;
      m.beta = (1.0 + param * param) / sk;
      m.sigma = FieldCoeffs::sigma_field(0, 0.25);
      m.b = FieldCoeffs::b_field(-param, 0.5, -0.25 * param);
      break;
    case Family::Custom:
      throw Error(ErrorCode::ParameterRange, "custom models have no family formula");
  }
  m.cft = CftParams::from_kappa(kappa, 0.0);
  m.cft.delta = m.alpha * m.cft.a;
  return m;
}

std::vector<FamilySpec> enumerate_families(double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::ParameterRange, "kappa must be positive");
  const bool k6 = near(kappa, 6.0), k8 = near(kappa, 8.0);
  std::vector<FamilySpec> out;

  FamilySpec chordal;
  chordal.kind = Family::ChordalDrift;
  chordal.label = "(1) chordal SLE with drift";
  chordal.parameter = "alpha";
  chordal.u_tag = "2a*arg(z) + alpha*a*Im(z)";
  chordal.note = "beta = alpha^2/sqrt(kappa); alpha < 0 gives u unbounded below";
  out.push_back(chordal);

  FamilySpec parabolic;
  parabolic.kind = Family::ParabolicBeta;
  parabolic.label = "(2) parabolic family, alpha = 0";
  parabolic.parameter = "beta";
  parabolic.u_tag = "2a*arg(z)";
  if (k6) {
    parabolic.degenerate = true;
    parabolic.extra = {"b1"};
    parabolic.note = "kappa = 6: b1 is free";
  } else if (k8) {
    parabolic.degenerate = true;
    parabolic.parameter = "none";
    parabolic.extra = {"b0"};
    parabolic.note = "kappa = 8: beta = 0 and b0 is free";
  }
  out.push_back(parabolic);

  FamilySpec dipolar;
  dipolar.kind = Family::DipolarDrift;
  dipolar.label = "(3) dipolar SLE with drift";
  dipolar.parameter = "alpha";
  dipolar.u_tag = "2a*arg(z) + (2bg - a(1+alpha))*arg(2-z) + (2bg - a(1-alpha))*arg(2+z)";
  dipolar.note = "beta = (alpha^2 - 1)/sqrt(kappa)";
  if (k6) dipolar.note += "; kappa = 6, alpha = 0: b1 undetermined by the system";
  out.push_back(dipolar);

  for (int s : {+1, -1}) {
    FamilySpec hyp;
    hyp.kind = Family::HyperbolicBeta;
    hyp.sign = s;
    hyp.label = s > 0 ? "(4+) hyperbolic family, alpha = (kappa-6)/2"
                      : "(4-) hyperbolic family, alpha = -(kappa-6)/2";
    hyp.parameter = "beta";
    hyp.u_tag = s > 0 ? "(kappa-6)*a*arg(2+z) + 2a*arg(z)" : "(kappa-6)*a*arg(2-z) + 2a*arg(z)";
    if (k6) {
      hyp.degenerate = true;
      hyp.extra = {"b1"};
      hyp.note = "kappa = 6: alpha = 0 and b1 is free";
    } else if (k8) {
      hyp.degenerate = true;
      hyp.parameter = "none";
      hyp.extra = {"b0"};
      hyp.note = "kappa = 8: beta = 0, b0 free, b1 = alpha(b0+1)/2";
    }
    out.push_back(hyp);
  }

  if (k6) {
    FamilySpec radial;
    radial.kind = Family::Radial6Drift;
    radial.label = "(5) radial SLE, kappa = 6, with drift";
    radial.parameter = "alpha";
    radial.u_tag = "-alpha*sqrt(1/3)*log|(z-2i)/(z+2i)| + sqrt(4/3)*arg(z)";
    radial.note = "beta = (1 + alpha^2)/sqrt(kappa); alpha = 0: b1 undetermined by the system";
    out.push_back(radial);
  }
  return out;
}

std::string family_catalogue_json(double kappa, double alpha, double beta) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& spec : enumerate_families(kappa)) {
    nlohmann::ordered_json j;
    std::vector<double> extra(spec.extra.size(), 0.0);
    const double param = spec.parameter == "beta" ? beta : alpha;
    const FlowModel m = spec.instantiate(kappa, param, extra);
    j["family"] = to_string(spec.kind);
    j["label"] = spec.label;
    j["kappa"] = kappa;
    j["alpha"] = m.alpha;
    j["beta"] = m.beta;
    j["b_coeffs"] = {m.b.bm1(), m.b.b0(), m.b.b1()};
    j["sigma_coeffs"] = {m.sigma.s0(), m.sigma.s1()};
    j["sigma_class"] = fields::to_string(fields::sigma_classify(m.sigma).tag);
    j["u_closed_form_tag"] = spec.u_tag;
    nlohmann::ordered_json params;
    params["parameter"] = spec.parameter;
    params["free_coefficients"] = spec.extra;
    params["degenerate"] = spec.degenerate;
    params["positive_u"] = !(spec.kind == Family::ChordalDrift && m.alpha < 0.0);
    params["note"] = spec.note;
    params["a"] = m.cft.a;
    params["background_charge"] = m.cft.bg;
    params["delta"] = m.cft.delta;
    j["params"] = params;
    arr.push_back(j);
  }
  return arr.dump(2);
}

FlowModel chordal_model(double kappa, double alpha) {
  return enumerate_families(kappa).front().instantiate(kappa, alpha);
}

FlowModel dipolar_model(double kappa, double alpha) {
  for (const auto& f : enumerate_families(kappa)) {
    if (f.kind == Family::DipolarDrift) return f.instantiate(kappa, alpha);
  }
  throw Error(ErrorCode::ParameterRange, "no dipolar family");
}

}  // namespace slitflow::classify
