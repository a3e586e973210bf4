#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "slitflow/classifier.hpp"
#include "slitflow/conformal.hpp"

namespace slitflow::flow {

using classify::FlowModel;

/// Grid Brownian path and the driving function ξ_t = √κ B_t + α t.
struct DrivingPath {
  double kappa = 0.0;
  double alpha = 0.0;
  double dt = 0.0;
  std::vector<double> times;  ///< n+1 grid times, times[0] = 0
  std::vector<double> dB;     ///< n increments of B
  std::vector<double> xi;     ///< n+1 values of ξ
  std::uint64_t seed = 0;
  /// False when increments are prescribed; then refinement interpolates linearly.
  bool stochastic = true;

  std::size_t steps() const { return dB.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  /// Seed of the bridge-refinement stream.
  std::uint64_t bridge_seed() const;
};

/// Throws ParameterRange unless T, dt > 0 and dt ≤ T.
DrivingPath sample_driving(double kappa, double alpha, double T, double dt, std::uint64_t seed);

/// Driving with B ≡ 0, so ξ_t = α t.
DrivingPath zero_noise_driving(double kappa, double alpha, double T, double dt);

/// Driving that samples a prescribed function ξ on the grid.
DrivingPath driving_from_function(double kappa, double T, double dt,
                                  const std::function<double(double)>& xi);

struct FlowOptions {
  double eps_swallow = 1e-4;
  double r_max = 1e6;
  /// Local step cap c·|w|² near the pole of b.
  double refine_c = 0.1;
  int max_level = 30;
  /// Record every k-th grid time in FlowPath outputs.
  std::size_t record_stride = 1;
};

/// Trajectory of one point.
struct FlowPath {
  cplx z0;
  std::vector<double> t;
  std::vector<cplx> w;       ///< flow value (w_t = g_t - ξ_t for Loewner solvers)
  std::vector<cplx> g;       ///< Loewner map value (Loewner solvers only)
  std::vector<cplx> log_wp;  ///< continuous log w'_t
  double tau = std::numeric_limits<double>::infinity();
  bool swallowed = false;
  std::string scheme;
};

/// Euler-Maruyama for many points driven by one Brownian path.
///
/// Each grid interval is subdivided dyadically while h > c|w|²; the midpoints
/// are Brownian-bridge values keyed by (interval, level, index), so all points
/// see the same refined path.
class SlitFlowEnsemble {
 public:
  SlitFlowEnsemble(const FlowModel& model, std::span<const cplx> z0, FlowOptions opt = {});

  /// Advances every live point across grid interval n.
  void advance(const DrivingPath& d, std::size_t n);
  /// Advances across all intervals whose end time is ≤ T.
  void run(const DrivingPath& d, double T);

  std::size_t size() const { return w_.size(); }
  cplx w(std::size_t i) const { return w_[i]; }
  cplx log_wp(std::size_t i) const { return lw_[i]; }
  bool alive(std::size_t i) const { return alive_[i] != 0; }
  double tau(std::size_t i) const { return tau_[i]; }
  double time() const { return t_; }
  std::span<const cplx> w_all() const { return w_; }
  std::span<const cplx> log_wp_all() const { return lw_; }

 private:
  void refine(std::size_t i, double t0, double h, double db, int level, std::uint64_t n,
              std::uint64_t idx, const DrivingPath& d);
  void euler(std::size_t i, double t0, double h, double db);

  double kappa_, sk_;
  double bm1_, b0_, b1_, s0_, s1_;
  FlowOptions opt_;
  std::vector<cplx> w_, lw_;
  std::vector<char> alive_;
  std::vector<double> tau_;
  double t_ = 0.0;
};

/// Single-point slit flow with the full recorded path.
FlowPath integrate_slit_flow(const FlowModel& model, cplx z0, const DrivingPath& d,
                             const FlowOptions& opt = {});

struct LoewnerOptions {
  double eps_swallow = 1e-4;
  double tol = 1e-12;
  /// Local step cap c·|Z|².
  double step_c = 0.1;
  std::size_t record_stride = 1;
};

/// ∂_t g = 2/(g - ξ) with ξ linear between grid points, adaptive RK4.
FlowPath chordal_loewner(const DrivingPath& d, cplx z0, const LoewnerOptions& opt = {});

/// ∂_t g = coth((g - ξ)/2) on the strip; w holds Z = g - ξ.
FlowPath dipolar_loewner(const DrivingPath& d, cplx z0, const LoewnerOptions& opt = {});

/// Right-hand side of the strip equation for Z = g - ξ.
inline cplx strip_velocity(cplx Z) {
  const cplx e = std::exp(-Z);
  return (1.0 + e) / (1.0 - e);
}

/// γ_t ≈ g_t⁻¹(ξ_t + iε) by reversed Loewner integration; chordal only.
std::vector<cplx> trace_points(const DrivingPath& d, std::span<const double> times,
                               double eps_trace = 1e-3);

struct HullSample {
  std::vector<cplx> points;
  std::vector<char> swallowed;
  std::vector<double> tau;
  double horizon = 0.0;
};

/// Swallow flags of seed points at horizon T under the slit flow of `model`.
HullSample hull_scan(const FlowModel& model, const DrivingPath& d, std::span<const cplx> grid,
                     double T, const FlowOptions& opt = {});

/// NDJSON records {path_id, t, re_w, im_w, re_logwp, im_logwp, swallowed}.
std::string path_ndjson(const FlowPath& p, std::uint64_t path_id);

}  // namespace slitflow::flow
