#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "oracle_values.hpp"
#include "slitflow/classifier.hpp"
#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/gff.hpp"
#include "slitflow/rng.hpp"
#include "slitflow/stats.hpp"

using namespace slitflow;
using namespace slitflow::gff;

namespace {

constexpr double kPi = std::numbers::pi;

const RectDomain& standard_domain() {
  static const RectDomain dom = RectDomain::make(-2.0, 0.0, 4.0, 3.0, 256, 64 * 64);
  return dom;
}

const EigenBasis& standard_basis() {
  static const EigenBasis basis(standard_domain());
  return basis;
}

std::vector<double> weighted_values(const TestFn& p, const QuadMesh& mesh) {
  std::vector<double> v = sample_on(p, mesh);
  for (double& x : v) x *= mesh.weight();
  return v;
}

/// A smooth field made of the lowest modes only.
GffSample smooth_field(const EigenBasis& basis) {
  GffSample s;
  s.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  rng::Engine eng(4);
  rng::Normal normal;
  for (Eigen::Index k = 0; k < 12; ++k) s.coeffs(k) = normal(eng);
  return s;
}

}  // namespace

TEST(EigenBasis, LowestEigenvalueOfUnitSquare) {
  const EigenBasis b(RectDomain::make(0.0, 0.0, 1.0, 1.0, 16, 10));
  EXPECT_NEAR(b.mode(0).lambda, 2.0 * kPi * kPi, 1e-12);
  EXPECT_EQ(b.mode(0).m, 1);
  EXPECT_EQ(b.mode(0).n, 1);
  EXPECT_NEAR(b.mode(1).lambda, 5.0 * kPi * kPi, 1e-12);
  for (std::size_t k = 1; k < b.size(); ++k) EXPECT_LE(b.mode(k - 1).lambda, b.mode(k).lambda);
}

TEST(EigenBasis, OrthonormalOnTheMidpointMesh) {
  const RectDomain dom = RectDomain::make(-1.0, 0.5, 2.0, 1.5, 64, 40);
  const EigenBasis b(dom);
  std::vector<cplx> pts;
  for (int j = 0; j < dom.mesh; ++j)
    for (int i = 0; i < dom.mesh; ++i) pts.push_back(dom.mesh_point(i, j));
  for (std::size_t k : {0u, 7u, 39u}) {
    std::vector<double> v(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) v[j] = b.eval(k, pts[j]) * dom.cell_area();
    const Eigen::VectorXd proj = b.project(pts, v);
    for (std::size_t l = 0; l < b.size(); ++l)
      EXPECT_NEAR(proj(static_cast<Eigen::Index>(l)), l == k ? 1.0 : 0.0, 1e-12) << k << "," << l;
  }
}

TEST(EigenBasis, EigenfunctionsSolveTheLaplacian) {
  const EigenBasis& b = standard_basis();
  const cplx z(0.37, 1.21);
  const double h = 1e-4;
  for (std::size_t k : {0u, 10u, 200u}) {
    const double lap = (b.eval(k, z + h) + b.eval(k, z - h) + b.eval(k, z + cplx(0, h)) +
                        b.eval(k, z - cplx(0, h)) - 4.0 * b.eval(k, z)) / (h * h);
    EXPECT_NEAR(lap, -b.mode(k).lambda * b.eval(k, z), 1e-4 * b.mode(k).lambda);
  }
  EXPECT_EQ(b.eval(0, cplx(5.0, 1.0)), 0.0);
}

TEST(EigenBasis, SynthesizeInvertsProjection) {
  const EigenBasis& b = standard_basis();
  const GffSample s = smooth_field(b);
  const std::vector<cplx> pts{{0.1, 0.2}, {1.3, 2.7}, {-1.9, 1.5}};
  const Eigen::VectorXd vals = b.synthesize(s.coeffs, pts);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    double direct = 0.0;
    for (std::size_t k = 0; k < 12; ++k) direct += s.coeffs(static_cast<Eigen::Index>(k)) * b.eval(k, pts[j]);
    EXPECT_NEAR(vals(static_cast<Eigen::Index>(j)), direct, 1e-12);
  }
}

TEST(Domain, Validation) {
  EXPECT_THROW(RectDomain::make(0, -0.1, 1, 1, 8, 4), Error);
  EXPECT_THROW(RectDomain::make(0, 0, 0, 1, 8, 4), Error);
  EXPECT_THROW(RectDomain::make(0, 0, 1, 1, 8, 65), Error);
}

TEST(Quadrature, CellMeanLogMatchesReference) {
  EXPECT_NEAR(cell_mean_log(1.0), oracle::kCellMeanLogH1, 1e-14);
  EXPECT_NEAR(cell_mean_log(0.1), oracle::kCellMeanLogH01, 1e-14);
}

TEST(Quadrature, BumpIntegralMatchesReference) {
  const TestFn p{cplx(0.3, 1.0), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 200);
  double s = 0.0;
  for (double v : sample_on(p, mesh)) s += v;
  EXPECT_NEAR(s * mesh.weight(), oracle::kBumpIntegralR05, 1e-8);
}

TEST(Energy, SpectralAgreesWithGreenQuadrature) {
  const TestFn p{cplx(0.0, 1.5), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 20);
  const std::vector<double> v = sample_on(p, mesh);
  const double spectral = spectral_energy(standard_basis(), mesh, v);
  const double green = energy_product(mesh, v, v, rectangle_kernel(standard_domain()));
  EXPECT_NEAR(spectral / green, 1.0, 0.01);
  // A larger domain carries more energy.
  EXPECT_GT(energy_product(mesh, v, v, half_plane_kernel()), green);
}

TEST(Energy, CrossTermForDisjointSupports) {
  const std::vector<TestFn> fns{{cplx(-1.0, 1.5), 0.4, 1.0}, {cplx(1.0, 1.2), 0.4, 1.0}};
  const QuadMesh mesh = support_mesh(fns, 0.04);
  const std::vector<double> p = sample_on(fns[0], mesh), q = sample_on(fns[1], mesh);
  const double green = energy_product(mesh, p, q, rectangle_kernel(standard_domain()));
  const EigenBasis& b = standard_basis();
  const Eigen::VectorXd P = b.project(mesh.points, weighted_values(fns[0], mesh));
  const Eigen::VectorXd Q = b.project(mesh.points, weighted_values(fns[1], mesh));
  double spectral = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    spectral += 4.0 * kPi / b.mode(k).lambda * P(i) * Q(i);
  }
  EXPECT_GT(green, 0.0);
  EXPECT_NEAR(spectral / green, 1.0, 0.05);
}

TEST(Energy, ImagesOfIdentityReproduceHalfPlaneEnergy) {
  const TestFn p{cplx(0.2, 1.0), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 16);
  const std::vector<double> v = sample_on(p, mesh);
  const std::vector<cplx> lw(mesh.points.size(), cplx(0.0));
  EXPECT_NEAR(energy_from_images(mesh, v, mesh.points, lw), energy_product(mesh, v, v, half_plane_kernel()),
              1e-10);
}

TEST(Energy, DecreasesAlongTheFlow) {
  const TestFn p{cplx(0.0, 2.0), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 16);
  const std::vector<double> v = sample_on(p, mesh);
  const auto model = classify::chordal_model(2.0, 0.0);
  const flow::DrivingPath d = flow::zero_noise_driving(2.0, 0.0, 0.2, 1e-3);
  flow::SlitFlowEnsemble ens(model, mesh.points);
  double previous = energy_product(mesh, v, v, half_plane_kernel());
  for (double T : {0.05, 0.1, 0.2}) {
    ens.run(d, T);
    const double e = energy_from_images(mesh, v, ens.w_all(), ens.log_wp_all());
    EXPECT_LT(e, previous) << "T=" << T;
    previous = e;
  }
}

TEST(Field, PairingLawMatchesSpectralEnergy) {
  const EigenBasis& b = standard_basis();
  const TestFn p{cplx(0.3, 1.4), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 16);
  const Eigen::VectorXd proj = b.project(mesh.points, weighted_values(p, mesh));
  const double energy = spectral_energy(b, mesh, sample_on(p, mesh));
  const std::size_t n = 3000;
  std::vector<double> xs;
  stats::RunningStats acc;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = sample_field(b, rng::path_seed(99, s)).coeffs.dot(proj);
    xs.push_back(x);
    acc.add(x);
  }
  EXPECT_LT(std::abs(acc.mean()), 4.0 * acc.standard_error());
  EXPECT_NEAR(acc.variance() / energy, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_LT(stats::ks_normal_statistic(xs, 0.0, std::sqrt(energy)), stats::ks_critical_1pct(n));
  // The full pairing routine agrees with the precomputed projection.
  const GffSample one = sample_field(b, rng::path_seed(99, 0));
  EXPECT_NEAR(pair(one, b, p, mesh), xs[0], 1e-12 * (1.0 + std::abs(xs[0])));
  EXPECT_EQ(sample_field(b, 5).coeffs, sample_field(b, 5).coeffs);
}

TEST(Field, SingleModePairing) {
  const EigenBasis& b = standard_basis();
  const TestFn p{cplx(-0.4, 1.1), 0.6, 1.0};
  const QuadMesh mesh = bump_mesh(p, 24);
  for (std::size_t k : {0u, 3u, 50u}) {
    GffSample s;
    s.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.size()));
    s.coeffs(static_cast<Eigen::Index>(k)) = 1.0;
    double direct = 0.0;
    for (const cplx z : mesh.points) direct += b.eval(k, z) * p(z);
    EXPECT_NEAR(pair(s, b, p, mesh), direct * mesh.weight(), 1e-12);
  }
}

TEST(Field, LinearInTheTestFunction) {
  const EigenBasis& b = standard_basis();
  const GffSample s = sample_field(b, 12);
  const TestFn p{cplx(0.5, 1.5), 0.5, 1.0}, p2{cplx(0.5, 1.5), 0.5, 2.5};
  const QuadMesh mesh = bump_mesh(p, 16);
  EXPECT_NEAR(pair(s, b, p2, mesh), 2.5 * pair(s, b, p, mesh), 1e-12);
}

TEST(Field, ShiftByConstant) {
  const EigenBasis& b = standard_basis();
  const GffSample s = sample_field(b, 13);
  const TestFn p{cplx(0.5, 1.5), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 16);
  double mass = 0.0;
  for (double v : sample_on(p, mesh)) mass += v;
  mass *= mesh.weight();
  EXPECT_NEAR(pair_shifted(s, b, p, mesh, [](cplx) { return 0.75; }), pair(s, b, p, mesh) + 0.75 * mass, 1e-12);
}

TEST(Field, SupportMustStayInside) {
  const EigenBasis& b = standard_basis();
  const GffSample s = sample_field(b, 14);
  const TestFn p{cplx(1.8, 1.5), 0.5, 1.0};
  EXPECT_THROW(pair(s, b, p, bump_mesh(p, 8)), Error);
}

TEST(Pullback, IdentityAndAffineMaps) {
  const EigenBasis& b = standard_basis();
  const GffSample s = smooth_field(b);
  const TestFn p{cplx(0.0, 1.2), 0.4, 1.0};
  const QuadMesh mesh = bump_mesh(p, 40);
  const conformal::IdentityMap id;
  const double direct = pair(s, b, p, mesh);
  EXPECT_NEAR(pullback_pair(s, b, id, p, mesh), direct, 1e-3 * std::abs(direct) + 1e-6);
  EXPECT_NEAR(pullback_pair_source(s, b, id, p, mesh), direct, 1e-14);

  const conformal::MobiusAut affine =
      conformal::MobiusAut::translation(0.1).compose(conformal::MobiusAut::scaling(1.2));
  const conformal::MobiusAut curved(1.0, 0.0, -0.2, 1.0);
  for (const conformal::MobiusAut* w : {&affine, &curved}) {
    const double source = pullback_pair_source(s, b, *w, p, mesh);
    EXPECT_NEAR(pullback_pair(s, b, *w, p, mesh), source, 2e-3 * std::abs(source) + 1e-6);
  }
}

TEST(Coupling, ZeroHorizonIsTheShiftedField) {
  const EigenBasis& b = standard_basis();
  const auto model = classify::dipolar_model(4.0, 0.2);
  const classify::HarmonicU u = classify::build_u(model);
  const TestFn p{cplx(0.2, 1.5), 0.5, 1.0};
  const QuadMesh mesh = bump_mesh(p, 16);
  CouplingConfig cfg;
  cfg.T = 0.0;
  const CoupledSample c = coupled_sample(model, u, b, p, mesh, cfg, 1, 2);
  const double expected = pair_shifted(sample_field(b, 2), b, p, mesh, [&](cplx z) { return u(z); });
  EXPECT_NEAR(c.value, expected, 1e-10);
  EXPECT_FALSE(c.collision);
}

TEST(Serialization, RoundTrip) {
  const RectDomain& dom = standard_domain();
  const GffSample s = sample_field(standard_basis(), 77);
  std::stringstream io;
  write_sample(io, s, dom);
  RectDomain back{};
  const GffSample r = read_sample(io, &back);
  EXPECT_EQ(r.seed, 77u);
  EXPECT_EQ(r.coeffs, s.coeffs);
  EXPECT_EQ(back.width, dom.width);
  EXPECT_EQ(back.modes, dom.modes);
  std::stringstream truncated(io.str().substr(0, 200));
  EXPECT_THROW(read_sample(truncated), Error);
}

TEST(StatsCsv, Header) {
  const std::vector<StatRow> rows{{"mean", 0.5, 0.1, 10}};
  EXPECT_EQ(stats_csv(rows), "stat,value,se,n\nmean,0.5,0.10000000000000001,10\n");
}
