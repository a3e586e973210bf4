#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracle_values.hpp"
#include "slitflow/conformal.hpp"
#include "slitflow/error.hpp"
#include "slitflow/rng.hpp"

using namespace slitflow;
using namespace slitflow::conformal;

namespace {

cplx random_upper(rng::Engine& eng) {
  return {6.0 * rng::uniform01(eng) - 3.0, 0.05 + 3.0 * rng::uniform01(eng)};
}

}  // namespace

TEST(HalfPlanePoint, RejectsBoundaryAndNonFinite) {
  EXPECT_THROW(HalfPlanePoint(cplx(1.0, 0.0)), Error);
  EXPECT_THROW(HalfPlanePoint(cplx(0.0, -1.0)), Error);
  EXPECT_THROW(HalfPlanePoint(cplx(NAN, 1.0)), Error);
  EXPECT_NO_THROW(HalfPlanePoint(cplx(0.0, 1e-300)));
}

TEST(Green, ClosedFormValueAndSymmetry) {
  const HalfPlanePoint z1(cplx(0, 1)), z2(cplx(1, 2));
  EXPECT_NEAR(green_half_plane(z1, z2), oracle::kGreenI_1p2i, 1e-15);
  EXPECT_NEAR(green_half_plane(z1, z2), 0.5 * std::log(5.0), 1e-15);
  rng::Engine eng(1);
  for (int k = 0; k < 200; ++k) {
    const cplx a = random_upper(eng), b = random_upper(eng);
    EXPECT_NEAR(green_half_plane_raw(a, b), green_half_plane_raw(b, a), 1e-14);
    EXPECT_GT(green_half_plane_raw(a, b), 0.0);
  }
  EXPECT_THROW(green_half_plane(z1, z1), Error);
}

TEST(Mobius, GroupLawsAndHalfPlaneInvariance) {
  const MobiusAut m(2.0, 1.0, -0.5, 0.75);
  const MobiusAut id = m.compose(m.inverse());
  rng::Engine eng(2);
  for (int k = 0; k < 100; ++k) {
    const cplx z = random_upper(eng);
    EXPECT_LT(std::abs(id(z) - z), 1e-12);
    EXPECT_GT(m(z).imag(), 0.0);
    const cplx h = 1e-6;
    EXPECT_LT(std::abs((m(z + h) - m(z - h)) / (2.0 * h) - m.derivative(z)), 1e-6);
  }
  const auto& c = m.coeffs();
  EXPECT_NEAR(c[0] * c[3] - c[1] * c[2], 1.0, 1e-14);
  EXPECT_THROW(MobiusAut(1.0, 0.0, 0.0, -1.0), Error);
}

TEST(Mobius, GreenIsInvariant) {
  const MobiusAut m = MobiusAut(1.0, 2.0, -1.0, 0.5).compose(MobiusAut::scaling(3.0));
  rng::Engine eng(3);
  for (int k = 0; k < 200; ++k) {
    const cplx a = random_upper(eng), b = random_upper(eng);
    EXPECT_NEAR(green_half_plane_raw(m(a), m(b)), green_half_plane_raw(a, b), 1e-10);
    EXPECT_NEAR(green_pullback(m, a, b), green_half_plane_raw(a, b), 1e-10);
  }
}

TEST(Strip, TransportSendsMarkedPoints) {
  EXPECT_LT(std::abs(strip_to_half_plane(cplx(0.0, std::numbers::pi / 2)).value() - cplx(0.0, 1.0)), 1e-15);
  EXPECT_NEAR(strip_to_half_plane(cplx(40.0, 1.0)).value().real(), 1.0, 1e-12);
  EXPECT_NEAR(strip_to_half_plane(cplx(-40.0, 1.0)).value().real(), -1.0, 1e-12);
  rng::Engine eng(4);
  const StripMap phi;
  for (int k = 0; k < 100; ++k) {
    const cplx z(8.0 * rng::uniform01(eng) - 4.0, 0.05 + 3.0 * rng::uniform01(eng));
    const HalfPlanePoint w = strip_to_half_plane(z);
    EXPECT_LT(std::abs(half_plane_to_strip(w) - z), 1e-12);
    const cplx h = 1e-6;
    EXPECT_LT(std::abs((phi(z + h) - phi(z - h)) / (2.0 * h) - phi.derivative(z)), 1e-7);
  }
  EXPECT_THROW(strip_to_half_plane(cplx(0.0, 4.0)), Error);
}

TEST(Rectangle, JacobiSnMatchesReference) {
  EXPECT_LT(std::abs(jacobi_sn(cplx(0.3, 0.4), 0.6) - oracle::kSnValue), 1e-13);
  EXPECT_NEAR(jacobi_sn(cplx(0.7, 0.0), 0.0).real(), std::sin(0.7), 1e-15);
}

TEST(Rectangle, MapsInteriorToHalfPlaneAndBottomToInterval) {
  const RectangleMap F(-2.0, 0.0, 4.0, 3.0);
  rng::Engine eng(5);
  for (int k = 0; k < 200; ++k) {
    const cplx z(-2.0 + 4.0 * rng::uniform01(eng), 3.0 * rng::uniform01(eng) + 1e-3);
    if (z.imag() >= 3.0) continue;
    EXPECT_GT(F(z).imag(), 0.0);
  }
  for (double x : {-1.9, -1.0, 0.0, 0.5, 1.9}) {
    const cplx w = F(cplx(x, 1e-12));
    EXPECT_LT(std::abs(w.imag()), 1e-9);
    EXPECT_LE(std::abs(w.real()), 1.0 + 1e-12);
  }
  const cplx z(0.3, 1.1), h = 1e-6;
  EXPECT_LT(std::abs((F(z + h) - F(z - h)) / (2.0 * h) - F.derivative(z)) / std::abs(F.derivative(z)), 1e-7);
}

TEST(Triangle, BarycentricOfVerticesAndOutside) {
  const TriangleSpec tri = TriangleSpec::from_vertices(0.0, 1.0, cplx(0.25, 0.8));
  EXPECT_NEAR(tri.angleA + tri.angleB + tri.angleC, std::numbers::pi, 1e-14);
  const Barycentric c = barycentric(tri.centroid(), tri);
  EXPECT_NEAR(c.a, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(c.a + c.b + c.c, 1.0, 1e-15);
  EXPECT_NEAR(barycentric(tri.B, tri).b, 1.0, 1e-14);
  EXPECT_THROW(barycentric(cplx(2.0, 2.0), tri), Error);
}

TEST(ScMap, TriangleMatchesIndependentConstruction) {
  for (const auto& cz : oracle::kCardyZhan) {
    const ScMap sc = sc_map_build(cz.kappa, cz.alpha);
    const TriangleSpec& tri = sc.triangle();
    EXPECT_LT(std::abs(tri.A), 1e-15);
    EXPECT_LT(std::abs(tri.B - 1.0), 1e-15);
    EXPECT_LT(std::abs(tri.C - cz.c_vertex), 1e-10);
    EXPECT_NEAR(tri.angleA, (1.0 - 4.0 / cz.kappa) * std::numbers::pi, 1e-10);
    EXPECT_NEAR(tri.angleC, 2.0 * (1.0 + cz.alpha) / cz.kappa * std::numbers::pi, 1e-10);
    EXPECT_NEAR(tri.angleB, 2.0 * (1.0 - cz.alpha) / cz.kappa * std::numbers::pi, 1e-10);
  }
}

TEST(ScMap, BarycentricOracleAtAcceptancePoints) {
  for (const auto& cz : oracle::kCardyZhan) {
    const ScMap sc = sc_map_build(cz.kappa, cz.alpha);
    const Barycentric b = barycentric(sc.f(cz.z), sc.triangle());
    EXPECT_NEAR(b.a, cz.abc[0], 1e-9) << cz.kappa << " " << cz.alpha << " " << cz.z;
    EXPECT_NEAR(b.b, cz.abc[1], 1e-9);
    EXPECT_NEAR(b.c, cz.abc[2], 1e-9);
  }
}

TEST(ScMap, LimitsAtStripEnds) {
  const ScMap sc = sc_map_build(6.0, 0.0);
  EXPECT_GT(barycentric(sc.f(cplx(0.0, 1e-6)), sc.triangle()).a, 0.99);
  EXPECT_GT(barycentric(sc.f(cplx(30.0, 1.5)), sc.triangle()).b, 0.99);
  EXPECT_GT(barycentric(sc.f(cplx(-30.0, 1.5)), sc.triangle()).c, 0.99);
  const Barycentric sym = barycentric(sc.f(cplx(0.0, std::numbers::pi / 2)), sc.triangle());
  EXPECT_NEAR(sym.b, sym.c, 1e-12);
}

TEST(ScMap, RejectsOutOfRangeParameters) {
  EXPECT_THROW(sc_map_build(4.0, 0.0), Error);
  EXPECT_THROW(sc_map_build(6.0, 1.0), Error);
}
