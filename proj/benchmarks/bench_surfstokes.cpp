#include <benchmark/benchmark.h>

#include "surfstokes/error_eval.hpp"
#include "surfstokes/solver.hpp"

using namespace surfstokes;

namespace {

BaseMesh mesh_at_level(const AnalyticSurface& surface, int level) {
  BaseMesh mesh = build_base_mesh(surface);
  for (int l = 0; l < level; ++l) mesh = refine(mesh, surface);
  return mesh;
}

}  // namespace

static void BM_LiftElements(benchmark::State& state) {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const BaseMesh mesh = mesh_at_level(sphere, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto lifts = lift_all_elements(mesh, sphere, 2);
    benchmark::DoNotOptimize(lifts);
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_triangles());
}
BENCHMARK(BM_LiftElements)->Arg(2)->Arg(3);

static void BM_AssembleSystem(benchmark::State& state) {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const BaseMesh mesh = mesh_at_level(sphere, static_cast<int>(state.range(0)));
  const AssemblyConfig config;
  const Discretization disc = build_discretization(mesh, sphere, config);
  const ManufacturedCase mms = killing_case(sphere);
  for (auto _ : state) {
    auto system = assemble_system(disc, &mms);
    benchmark::DoNotOptimize(system);
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_triangles());
}
BENCHMARK(BM_AssembleSystem)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_DirectSolve(benchmark::State& state) {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const BaseMesh mesh = mesh_at_level(sphere, static_cast<int>(state.range(0)));
  const AssemblyConfig config;
  const Discretization disc = build_discretization(mesh, sphere, config);
  const ManufacturedCase mms = killing_case(sphere);
  const SaddleSystem system = assemble_system(disc, &mms);
  for (auto _ : state) {
    auto result = solve_direct(system);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_DirectSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_MinresSolve(benchmark::State& state) {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const BaseMesh mesh = mesh_at_level(sphere, static_cast<int>(state.range(0)));
  const AssemblyConfig config;
  const Discretization disc = build_discretization(mesh, sphere, config);
  const ManufacturedCase mms = killing_case(sphere);
  const SaddleSystem system = assemble_system(disc, &mms);
  MinresOptions options;
  options.tol = 1e-10;
  for (auto _ : state) {
    auto result = solve_minres(system, options);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_MinresSolve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_EvalErrors(benchmark::State& state) {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const BaseMesh mesh = mesh_at_level(sphere, 3);
  const AssemblyConfig config;
  const Discretization disc = build_discretization(mesh, sphere, config);
  const ManufacturedCase mms = killing_case(sphere);
  const SaddleSystem system = assemble_system(disc, &mms);
  const SolveResult result = solve_direct(system);
  for (auto _ : state) {
    auto report = eval_errors(result, mms, disc);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_EvalErrors)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
