#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "oracle_values.hpp"
#include "slitflow/classifier.hpp"
#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/stats.hpp"

using namespace slitflow;
using namespace slitflow::flow;

TEST(Driving, VarianceAndDrift) {
  const double kappa = 4.0, alpha = 0.7;
  stats::RunningStats end;
  for (std::uint64_t s = 0; s < 4000; ++s) end.add(sample_driving(kappa, alpha, 1.0, 0.05, s).xi.back());
  EXPECT_LT(std::abs(end.mean() - alpha), 4.0 * end.standard_error());
  EXPECT_NEAR(end.variance(), kappa, 0.3);
}

TEST(Driving, DeterministicAndValidated) {
  const DrivingPath a = sample_driving(3.0, 0.0, 1.0, 0.01, 9), b = sample_driving(3.0, 0.0, 1.0, 0.01, 9);
  EXPECT_EQ(a.xi, b.xi);
  EXPECT_NE(a.xi, sample_driving(3.0, 0.0, 1.0, 0.01, 10).xi);
  EXPECT_EQ(a.steps(), 100u);
  EXPECT_DOUBLE_EQ(a.horizon(), 1.0);
  EXPECT_THROW(sample_driving(3.0, 0.0, 1.0, 0.0, 1), Error);
  EXPECT_THROW(sample_driving(3.0, 0.0, 0.1, 0.2, 1), Error);
  const DrivingPath odd = sample_driving(3.0, 0.0, 1.0, 0.3, 1);
  EXPECT_EQ(odd.steps(), 4u);
  EXPECT_DOUBLE_EQ(odd.times.back(), 1.0);
}

TEST(SlitFlow, ZeroNoiseVerticalSlit) {
  const auto model = classify::chordal_model(2.0, 0.0);
  auto end_error = [&](double dt) {
    const FlowPath p = integrate_slit_flow(model, cplx(0.0, 3.0), zero_noise_driving(2.0, 0.0, 1.0, dt));
    EXPECT_FALSE(p.swallowed);
    // w' = y/√(y² - 4t) on the axis.
    EXPECT_NEAR(p.log_wp.back().real(), std::log(3.0 / oracle::kVerticalSlitY3T1), 2.0 * dt / 1e-5 * 1e-6);
    return std::abs(p.w.back() - cplx(0.0, oracle::kVerticalSlitY3T1));
  };
  const double fine = end_error(1e-5), coarse = end_error(2e-5);
  // Euler is first order: about 1.3e-6 at dt = 1e-5, halving with the step.
  EXPECT_LT(fine, 2e-6);
  EXPECT_NEAR(coarse / fine, 2.0, 0.05);
}

TEST(SlitFlow, UnitPointSwallowedAtQuarter) {
  const auto model = classify::chordal_model(2.0, 0.0);
  const FlowPath p = integrate_slit_flow(model, cplx(0.0, 1.0), zero_noise_driving(2.0, 0.0, 1.0, 1e-4));
  EXPECT_TRUE(p.swallowed);
  EXPECT_NEAR(p.tau, 0.25, 1e-3);
}

TEST(SlitFlow, TinyHeightSwallowedAlmostAtOnce) {
  const auto model = classify::chordal_model(2.0, 0.0);
  const FlowPath p = integrate_slit_flow(model, cplx(0.0, 1e-3), zero_noise_driving(2.0, 0.0, 0.01, 1e-3));
  EXPECT_TRUE(p.swallowed);
  EXPECT_LE(p.tau, 1e-4);
}

TEST(SlitFlow, AgreesWithLoewnerSolver) {
  const auto model = classify::chordal_model(3.0, 0.4);
  const DrivingPath d = sample_driving(3.0, 0.4, 0.5, 1e-5, 21);
  const FlowPath euler = integrate_slit_flow(model, cplx(0.0, 2.0), d);
  const FlowPath rk = chordal_loewner(d, cplx(0.0, 2.0));
  ASSERT_FALSE(euler.swallowed);
  EXPECT_LT(std::abs(euler.w.back() - rk.w.back()), 1e-4);
  EXPECT_LT(std::abs(euler.log_wp.back() - rk.log_wp.back()), 1e-4);
}

TEST(SlitFlow, ChordalHeightDecreases) {
  const auto model = classify::chordal_model(4.0, 0.0);
  const FlowPath p = integrate_slit_flow(model, cplx(0.5, 1.5), sample_driving(4.0, 0.0, 0.4, 1e-3, 3));
  for (std::size_t k = 1; k < p.w.size(); ++k) EXPECT_LT(p.w[k].imag(), p.w[k - 1].imag());
}

TEST(SlitFlow, EnsembleMatchesSinglePoint) {
  const auto model = classify::dipolar_model(4.0, 0.3);
  const DrivingPath d = sample_driving(4.0, 0.3, 0.3, 1e-3, 5);
  const cplx pts[3] = {cplx(0.0, 2.0), cplx(1.0, 1.5), cplx(-1.5, 2.5)};
  SlitFlowEnsemble ens(model, pts);
  ens.run(d, 0.3);
  for (std::size_t i = 0; i < 3; ++i) {
    const FlowPath p = integrate_slit_flow(model, pts[i], d);
    EXPECT_EQ(ens.w(i), p.w.back());
  }
  EXPECT_THROW(SlitFlowEnsemble(model, std::vector<cplx>{cplx(1.0, 0.0)}), Error);
}

TEST(SlitFlow, StepExplosionBeyondRadius) {
  const auto model = classify::chordal_model(2.0, -50.0);
  FlowOptions opt;
  opt.r_max = 3.0;
  EXPECT_THROW(integrate_slit_flow(model, cplx(0.0, 1.0), zero_noise_driving(2.0, -50.0, 1.0, 1e-3), opt), Error);
}

TEST(Loewner, VerticalSlitAndCapacity) {
  const DrivingPath d = zero_noise_driving(2.0, 0.0, 0.2, 1e-3);
  const FlowPath p = chordal_loewner(d, cplx(0.0, 1.0));
  EXPECT_LT(std::abs(p.g.back() - cplx(0.0, oracle::kVerticalSlitY1T02)), 1e-8);
  const FlowPath far = chordal_loewner(zero_noise_driving(2.0, 0.0, 1.0, 1e-2), cplx(0.0, 100.0));
  EXPECT_LT(std::abs((far.g.back() - cplx(0.0, 100.0)) * cplx(0.0, 100.0) - oracle::kCapacity100i), 1e-8);
}

TEST(Loewner, StripFlowEscapesRight) {
  const FlowPath p = dipolar_loewner(zero_noise_driving(2.0, 0.0, 2.0, 1e-2), cplx(0.5, 1.5));
  for (std::size_t k = 1; k < p.w.size(); ++k) EXPECT_GT(p.w[k].real(), p.w[k - 1].real());
  EXPECT_THROW(dipolar_loewner(zero_noise_driving(2.0, 0.0, 1.0, 1e-2), cplx(0.0, 3.5)), Error);
}

TEST(Loewner, StripFlowWithPrescribedDriving) {
  auto xi = [](double t) { return 0.5 * std::sin(t); };
  const double T = 1.0;
  const FlowPath p = dipolar_loewner(driving_from_function(2.0, T, 1e-3, xi), cplx(0.2, 1.0));
  // Reference: fixed-step RK4 on ∂g = coth((g - ξ)/2) with the exact driving.
  cplx g(0.2, 1.0);
  const int n = 20000;
  const double h = T / n;
  auto rate = [&](double t, cplx v) { return strip_velocity(v - xi(t)); };
  for (int k = 0; k < n; ++k) {
    const double t = k * h;
    const cplx k1 = rate(t, g), k2 = rate(t + 0.5 * h, g + 0.5 * h * k1);
    const cplx k3 = rate(t + 0.5 * h, g + 0.5 * h * k2), k4 = rate(t + h, g + h * k3);
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  // The solver interpolates ξ linearly between grid points: error O(dt²).
  EXPECT_LT(std::abs(p.g.back() - g), 1e-6);
}

TEST(Trace, ZeroDrivingIsVerticalSegment) {
  const DrivingPath d = zero_noise_driving(2.0, 0.0, 1.0, 1e-3);
  const std::vector<double> times{0.04, 0.25, 1.0};
  const auto pts = trace_points(d, times, 1e-6);
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(pts[k].real(), 0.0, 1e-9);
    EXPECT_NEAR(pts[k].imag(), 2.0 * std::sqrt(times[k]), 1e-5);
  }
  EXPECT_THROW(trace_points(d, std::vector<double>{2.0}), Error);
}

TEST(Trace, LinearDrivingBendsMonotonically) {
  const DrivingPath d = zero_noise_driving(2.0, 5.0, 1.0, 1e-3);
  std::vector<double> times;
  for (int k = 1; k <= 20; ++k) times.push_back(0.05 * k);
  const auto pts = trace_points(d, times);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    EXPECT_GT(pts[k].real(), pts[k - 1].real());
    EXPECT_GT(pts[k].imag(), 0.0);
  }
}

TEST(Hull, ZeroNoiseHullIsTheSlit) {
  const auto model = classify::chordal_model(2.0, 0.0);
  const DrivingPath d = zero_noise_driving(2.0, 0.0, 1.0, 1e-4);
  const std::vector<cplx> grid{{0.0, 1.0}, {0.0, 1.9}, {0.0, 2.1}, {0.3, 1.0}, {-0.3, 0.5}};
  const HullSample h = hull_scan(model, d, grid, 1.0);
  EXPECT_EQ(h.swallowed, (std::vector<char>{1, 1, 0, 0, 0}));
  EXPECT_NEAR(h.tau[0], 0.25, 1e-3);
  EXPECT_NEAR(h.tau[1], 1.9 * 1.9 / 4.0, 1e-3);
}

TEST(Hull, HullsAreNested) {
  const auto model = classify::chordal_model(4.0, 0.0);
  const DrivingPath d = sample_driving(4.0, 0.0, 1.0, 1e-3, 17);
  std::vector<cplx> grid;
  for (int i = -10; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) grid.emplace_back(0.2 * i, 0.2 * j);
  const HullSample early = hull_scan(model, d, grid, 0.3), late = hull_scan(model, d, grid, 1.0);
  int count_early = 0, count_late = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (early.swallowed[i]) EXPECT_TRUE(late.swallowed[i]) << grid[i];
    count_early += early.swallowed[i];
    count_late += late.swallowed[i];
  }
  EXPECT_GT(count_late, count_early);
}

TEST(Ndjson, RecordsCarryAllFields) {
  const auto model = classify::chordal_model(2.0, 0.0);
  FlowOptions opt;
  opt.record_stride = 100;
  const FlowPath p = integrate_slit_flow(model, cplx(0.0, 1.0), zero_noise_driving(2.0, 0.0, 1.0, 1e-3), opt);
  std::istringstream in(path_ndjson(p, 7));
  std::string line;
  std::size_t n = 0;
  nlohmann::json last;
  while (std::getline(in, line)) {
    last = nlohmann::json::parse(line);
    for (const char* key : {"path_id", "t", "re_w", "im_w", "re_logwp", "im_logwp", "swallowed"})
      EXPECT_TRUE(last.contains(key)) << key;
    EXPECT_EQ(last["path_id"], 7);
    ++n;
  }
  EXPECT_EQ(n, p.t.size());
  EXPECT_TRUE(last["swallowed"].get<bool>());
}
