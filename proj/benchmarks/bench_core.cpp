#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "slitflow/classifier.hpp"
#include "slitflow/conformal.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/gff.hpp"

using namespace slitflow;

static void BM_FlowEnsembleStep(benchmark::State& state) {
  const auto model = classify::dipolar_model(4.0, 0.3);
  const auto d = flow::sample_driving(4.0, 0.3, 0.1, 1e-4, 1);
  std::vector<cplx> pts;
  for (int i = 0; i < state.range(0); ++i) pts.emplace_back(-1.0 + 2.0 * i / state.range(0), 1.5);
  for (auto _ : state) {
    flow::SlitFlowEnsemble ens(model, pts);
    ens.run(d, 0.1);
    benchmark::DoNotOptimize(ens.w(0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.steps()) * state.range(0));
}
BENCHMARK(BM_FlowEnsembleStep)->Arg(1)->Arg(64)->Arg(512);

static void BM_GffProjection(benchmark::State& state) {
  const auto dom = gff::RectDomain::make(-16.0, 0.0, 32.0, 24.0, 256, static_cast<std::size_t>(state.range(0)));
  const gff::EigenBasis basis(dom);
  const gff::TestFn bump{cplx(0.0, 2.0), 0.5, 1.0};
  const gff::QuadMesh mesh = gff::bump_mesh(bump, 24);
  std::vector<double> v = gff::sample_on(bump, mesh);
  for (double& x : v) x *= mesh.weight();
  for (auto _ : state) benchmark::DoNotOptimize(basis.project(mesh.points, v));
}
BENCHMARK(BM_GffProjection)->Arg(32 * 32)->Arg(64 * 64);

static void BM_ScMapEval(benchmark::State& state) {
  const conformal::ScMap sc = conformal::sc_map_build(6.0, 0.3);
  const cplx z(0.4, std::numbers::pi / 2);
  for (auto _ : state) benchmark::DoNotOptimize(sc.f(z));
}
BENCHMARK(BM_ScMapEval);

static void BM_ScMapBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(conformal::sc_map_build(6.0, 0.3));
}
BENCHMARK(BM_ScMapBuild);

BENCHMARK_MAIN();
