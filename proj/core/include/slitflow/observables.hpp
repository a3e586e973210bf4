#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slitflow/classifier.hpp"
#include "slitflow/conformal.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/gff.hpp"
#include "slitflow/stats.hpp"

namespace slitflow::obs {

using classify::FlowModel;
using classify::HarmonicU;

/// u_t(z) = u(w) - 2𝔟 arg w', with arg w' read from the continuous log w'.
inline double u_value(const HarmonicU& u, double bg, cplx w, cplx log_wp) {
  return u(w) - 2.0 * bg * log_wp.imag();
}

struct UProcess {
  std::vector<double> t;
  std::vector<double> u;
  double tau = 0.0;
  bool swallowed = false;
};

/// Samples of u_t along a recorded flow path (truncated at the swallow time).
UProcess u_process(const flow::FlowPath& path, const HarmonicU& u, double bg);

/// M_t = u_t(z1) u_t(z2) + 2 G_ℍ(w_t(z1), w_t(z2)) on the common recorded times.
std::vector<double> pair_martingale(const flow::FlowPath& p1, const flow::FlowPath& p2, const HarmonicU& u,
                                    double bg);

/// z-test of E[terminal - initial] = 0; a degenerate variance is noted in the report.
stats::McReport drift_test(const std::string& name, std::span<const double> increments, double threshold = 3.0);
stats::McReport drift_test(const std::string& name, const stats::RunningStats& increments, double threshold = 3.0);

// ---- vertex observables -------------------------------------------------------

/// Charges (τ, τ*; τ₋, τ₊) at z, q₋ = -1, q₊ = +1, with the insertion parameter δ.
struct ChargeVector {
  double tau = 0.0;
  double tau_star = 0.0;
  double tau_minus = 0.0;
  double tau_plus = 0.0;
  double delta = 0.0;

  double total() const { return tau + tau_star + tau_minus + tau_plus; }
  /// Throws Neutrality when |Στ| > tol.
  void require_neutral(double tol = 1e-12) const;

  double lambda(double bg) const { return 0.5 * tau * tau - tau * bg; }
  double lambda_star(double bg) const { return 0.5 * tau_star * tau_star - tau_star * bg; }
  double lambda_pm(int sign) const;
  double lambda_hat_pm(int sign, double a) const;
  /// ν^± = τ(𝔟 + τ_±); ν*^± likewise with τ*.
  double nu(int sign, double bg) const;
  double nu_star(int sign, double bg) const;
  /// ν̂^± = τ(𝔟 - (a ± δ)/2 + τ_±).
  double nu_hat(int sign, double bg, double a) const;
  double nu_hat_star(int sign, double bg, double a) const;
};

enum class VertexVariant { Plain, Inserted };

/// Correlation part of the OPE exponential in the identity chart of ℍ.
/// Throws Neutrality or BranchPoint (z near 0, ±1).
cplx vertex_correlation(const ChargeVector& q, double bg, double a, cplx z, VertexVariant variant);

/// Charges (-2a, 0; a - δ, a + δ) with δ = αa, the Cardy-Zhan vertex observable.
ChargeVector cardy_zhan_charges(double kappa, double alpha);

/// Vertex observable used in the martingale suite, evaluated on the flow state
/// (w, log w'). Chordal: w^(-4/κ) e^(2αw/κ) w'. Dipolar: M̂(w/2) w'.
cplx vertex_observable(const FlowModel& model, cplx w, cplx log_wp);

/// Itô drift of vertex_observable at (w, log w') relative to its value, by
/// finite differences; zero for a local martingale.
cplx vertex_generator_residual(const FlowModel& model, cplx w);

struct ScResidual {
  double sc = 0.0;      ///< |h''/h' - RHS| of the SC ODE
  double remark = 0.0;  ///< |∂M̂/M̂ - RHS| in the (ℍ, 0, ±1) chart
};

/// Both residuals at z; throws BranchPoint near 0, ±1.
ScResidual bpz_sc_residual(double kappa, double alpha, cplx z);

/// Deterministic one-point function of the hatted field.
/// Chordal: 2a arg z + αa Im z. Dipolar (marked points ±1, δ = αa):
/// 2a arg z - (a-δ) arg(1+z) - (a+δ) arg(1-z) + 2𝔟 arg(1-z²).
double phi_hat_one_point(const FlowModel& model, cplx z);

/// Dipolar one-point function with marked points ±q and δ = αaq/2; tends to the
/// chordal value as q → ∞.
double phi_hat_one_point_q(double kappa, double alpha, double q, cplx z);

// ---- ensemble experiments ---------------------------------------------------------

struct SuiteConfig {
  double T = 0.3;
  double dt = 1e-4;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  flow::FlowOptions flow;
};

struct SuiteResult {
  std::vector<stats::McReport> reports;
  std::size_t swallowed = 0;
  bool all_pass() const;
};

/// drift_test of u_t at each point, M_t for each pair and the vertex observable
/// (real and imaginary parts) at the first point.
SuiteResult martingale_suite(const FlowModel& model, std::span<const cplx> points,
                             std::span<const std::pair<std::size_t, std::size_t>> pairs,
                             const SuiteConfig& cfg);

struct QvConfig {
  double T = 0.2;
  double dt = 1e-4;
  std::size_t n_paths = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int per_diameter = 20;
  flow::FlowOptions flow;
};

struct QvResult {
  stats::McReport report;  ///< per-path QV - (E₀ - E_T), target 0
  double qv_mean = 0.0;
  double drop_mean = 0.0;
  double e0 = 0.0;
  double rel_error = 0.0;
  std::size_t collisions = 0;
};

/// Realized quadratic variation of (u_t, p) against the energy drop E₀ - E_T.
QvResult qv_check(const FlowModel& model, const gff::TestFn& p, const QvConfig& cfg);

struct HadamardResult {
  double green_error = 0.0;       ///< max |∫ -4 Im(1/w1) Im(1/w2) dt - (G_T - G_0)|
  double covariation_rel = 0.0;   ///< |mean realized - mean predicted| / |mean predicted|
  double realized = 0.0;
  double predicted = 0.0;
  std::size_t n = 0;
};

/// Pathwise Hadamard identity for the chordal model with σ = -1.
HadamardResult hadamard_pathwise(const FlowModel& model, cplx z1, cplx z2, double T, double dt,
                                 std::size_t n_paths, std::uint64_t seed, unsigned threads);

struct CouplingExperimentConfig {
  gff::RectDomain domain = gff::RectDomain{-16.0, 0.0, 32.0, 24.0, 256, 64 * 64};
  gff::TestFn bump{cplx(0.0, 2.0), 0.5, 1.0};
  int per_diameter = 24;
  std::size_t n_samples = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  gff::CouplingConfig coupling;
};

struct CouplingResult {
  stats::McReport mean_report;  ///< sample mean vs (u, p)
  double variance = 0.0;
  double target_variance = 0.0;  ///< ‖p‖²_{E(ℍ)}
  double spectral_variance = 0.0;
  double variance_rel = 0.0;
  double ks = 0.0;
  double ks_critical = 0.0;
  std::size_t collisions = 0;
  std::vector<double> samples;
  bool pass() const;
};

/// Terminal law of the coupling: N((u,p), E₀) in mean, variance and KS distance.
CouplingResult coupling_experiment(const FlowModel& model, const CouplingExperimentConfig& cfg);

// ---- Cardy-Zhan ------------------------------------------------------------------

struct CardyZhanConfig {
  std::size_t n_paths = 20000;
  double T_max = 200.0;
  double dt = 2e-4;
  double coarse_dt = 0.02;
  double fine_band = 3.0;
  double escape = 40.0;
  double eps_class = 0.02;
  double eps_swallow = 1e-4;
  /// Fine steps are bisected until h <= refine_ratio |Z|².
  double refine_ratio = 0.01;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

enum class Endpoint : int { Swallowed = 0, Right = 1, Left = 2, Ambiguous = 3 };

/// Endpoint of one strip path started at z.
Endpoint cardy_zhan_path(double kappa, double alpha, cplx z, const conformal::ScMap& sc,
                         const CardyZhanConfig& cfg, std::uint64_t path_seed);

struct CardyZhanResult {
  cplx z;
  stats::McReport a, b, c;
  conformal::Barycentric oracle;
  std::size_t counts[4] = {0, 0, 0, 0};
  double ambiguous_frac = 0.0;
  bool pass() const;
};

CardyZhanResult cardy_zhan(double kappa, double alpha, cplx z, const CardyZhanConfig& cfg);

/// CSV rows {re_z, im_z, a_mc, b_mc, c_mc, a_sc, b_sc, c_sc, se, ambiguous_frac}.
std::string cardy_zhan_csv(std::span<const CardyZhanResult> rows);

/// CSV rows {name, kappa, alpha, n, mean, se, target, zscore, pass}.
std::string reports_csv(std::span<const stats::McReport> rows);

}  // namespace slitflow::obs
