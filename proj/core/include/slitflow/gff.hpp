#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "slitflow/classifier.hpp"
#include "slitflow/conformal.hpp"
#include "slitflow/flow.hpp"

namespace slitflow::gff {

/// Axis-aligned rectangle [x0, x0+W] × [y0, y0+H] in the closed half-plane.
struct RectDomain {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 1.0;
  double height = 1.0;
  /// Cells per side of the reference mesh.
  int mesh = 256;
  /// Number of retained modes.
  std::size_t modes = 64 * 64;

  /// Throws ParameterRange on a degenerate rectangle, y0 < 0 or modes > mesh².
  static RectDomain make(double x0, double y0, double width, double height, int mesh,
                         std::size_t modes);
  bool contains(cplx z) const;
  /// Cell-centred mesh point (i, j), 0 ≤ i, j < mesh.
  cplx mesh_point(int i, int j) const;
  double cell_area() const { return (width / mesh) * (height / mesh); }
};

struct Mode {
  int m = 1;
  int n = 1;
  double lambda = 0.0;
};

/// Dirichlet eigenpairs e_mn = (2/√(WH)) sin(mπx/W) sin(nπy/H), ascending in λ.
class EigenBasis {
 public:
  explicit EigenBasis(const RectDomain& dom);

  const RectDomain& domain() const { return dom_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t k) const { return modes_[k]; }
  int max_m() const { return max_m_; }
  int max_n() const { return max_n_; }

  double eval(std::size_t k, cplx z) const;

  /// Projections (e_k, f) for f given by samples and weights at `points`.
  Eigen::VectorXd project(std::span<const cplx> points, std::span<const double> weighted_values) const;

  /// Σ_k coeffs_k e_k(z_j) for every point; zero outside the rectangle.
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs, std::span<const cplx> points) const;

  /// Σ_j weighted_values_j Σ_k coeffs_k e_k(points_j), one GEMM per call.
  double pair_points(const Eigen::VectorXd& coeffs, std::span<const cplx> points,
                     std::span<const double> weighted_values) const;

 private:
  void sine_tables(std::span<const cplx> points, Eigen::MatrixXd& sx, Eigen::MatrixXd& sy) const;

  RectDomain dom_;
  std::vector<Mode> modes_;
  int max_m_ = 0;
  int max_n_ = 0;
  double norm_ = 0.0;
};

EigenBasis eigen_basis(const RectDomain& dom);

/// Smooth bump amplitude·exp(1 - 1/(1 - r²/R²)) supported on |z - centre| < R.
struct TestFn {
  cplx center;
  double radius = 1.0;
  double amplitude = 1.0;

  double operator()(cplx z) const;
};

/// Square-cell midpoint mesh; every cell has area h².
struct QuadMesh {
  std::vector<cplx> points;
  double h = 0.0;

  double weight() const { return h * h; }
};

/// Cells of side h (aligned to the integer lattice scaled by h) whose centres
/// fall inside the support of at least one test function.
QuadMesh support_mesh(std::span<const TestFn> fns, double h);
QuadMesh support_mesh(const TestFn& p, double h);
/// Mesh with `per_diameter` cells across the bump.
QuadMesh bump_mesh(const TestFn& p, int per_diameter);

std::vector<double> sample_on(const TestFn& p, const QuadMesh& mesh);

/// Green kernel split as G(z1, z2) = -log|z1 - z2| + regular part.
struct GreenKernel {
  std::function<double(cplx, cplx)> value;
  /// lim_{z'→z} G(z, z') + log|z - z'|.
  std::function<double(cplx)> robin;
};

GreenKernel half_plane_kernel();
/// G_ℍ pulled back through the rectangle's sn-map.
GreenKernel rectangle_kernel(const RectDomain& dom);

/// Mean of log|z - c| over a square cell of side h centred at c.
double cell_mean_log(double h);

/// ∫∫ 2G p q on a shared mesh; diagonal cells use the cell-mean log kernel.
double energy_product(const QuadMesh& mesh, std::span<const double> p, std::span<const double> q,
                      const GreenKernel& green);

/// ‖p‖²_E of the domain H_t = w_t⁻¹(ℍ) from the flow images of the mesh
/// points, G_{H_t}(z1, z2) = G_ℍ(w(z1), w(z2)).
double energy_from_images(const QuadMesh& mesh, std::span<const double> p,
                          std::span<const cplx> w, std::span<const cplx> log_wp);

/// Σ_k (4π/λ_k)(e_k, p)².
double spectral_energy(const EigenBasis& basis, const QuadMesh& mesh, std::span<const double> p);

struct GffSample {
  Eigen::VectorXd coeffs;
  std::uint64_t seed = 0;
};

/// c_k = ξ_k √(4π/λ_k) with ξ_k i.i.d. standard normals from `seed`.
GffSample sample_field(const EigenBasis& basis, std::uint64_t seed);

/// (Φ, p) = Σ_k c_k (e_k, p). Throws SupportViolation if p leaves the rectangle.
double pair(const GffSample& field, const EigenBasis& basis, const TestFn& p, const QuadMesh& mesh);

/// (Φ + u, p) = (Φ, p) + (u, p).
double pair_shifted(const GffSample& field, const EigenBasis& basis, const TestFn& p,
                    const QuadMesh& mesh, const std::function<double(cplx)>& u);

/// (u, p) by mesh quadrature.
double pair_function(const std::function<double(cplx)>& u, const TestFn& p, const QuadMesh& mesh);

struct PullbackOptions {
  double newton_tol = 1e-10;
  int newton_max = 50;
  /// Target-grid cells per unit of the source mesh spacing.
  double refine = 1.0;
};

/// (Φ∘w, p) = (Φ, |(w⁻¹)'|² p∘w⁻¹), integrated over a target grid covering
/// w(supp p). Newton inversion is seeded by the forward image of the source mesh;
/// throws InverseFailure when it does not converge.
double pullback_pair(const GffSample& field, const EigenBasis& basis, const conformal::ConformalMap& w,
                     const TestFn& p, const QuadMesh& mesh, const PullbackOptions& opt = {});

/// (Φ∘w, p) computed on the source side, ∫ Φ(w(z)) p(z) dA(z).
double pullback_pair_source(const GffSample& field, const EigenBasis& basis,
                            const conformal::ConformalMap& w, const TestFn& p, const QuadMesh& mesh);

struct CoupledSample {
  double value = 0.0;
  double field_part = 0.0;
  double u_part = 0.0;
  /// Flow images got within the margin of the boundary, or a point was swallowed.
  bool collision = false;
};

struct CouplingConfig {
  double T = 0.3;
  double dt = 1e-3;
  /// Minimal Im w_T on the support before the sample is flagged.
  double margin = 1e-2;
  flow::FlowOptions flow;
};

/// One realization of (Φ̃_{H_T}, p) = (Φ_ℍ∘w_T, p) + (u_T, p) with independent
/// flow and field seeds.
CoupledSample coupled_sample(const classify::FlowModel& model, const classify::HarmonicU& u,
                             const EigenBasis& basis, const TestFn& p, const QuadMesh& mesh,
                             const CouplingConfig& cfg, std::uint64_t flow_seed,
                             std::uint64_t field_seed);

/// Binary coefficient dump preceded by one JSON header line {domain, K, seed}.
void write_sample(std::ostream& os, const GffSample& s, const RectDomain& dom);
GffSample read_sample(std::istream& is, RectDomain* dom = nullptr);

struct StatRow {
  std::string stat;
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// CSV with header stat,value,se,n.
std::string stats_csv(std::span<const StatRow> rows);

}  // namespace slitflow::gff
