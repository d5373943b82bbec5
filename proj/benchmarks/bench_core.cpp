#include <benchmark/benchmark.h>

#include "twac/diagnostics.hpp"
#include "twac/errors.hpp"
#include "twac/field.hpp"
#include "twac/geodesics.hpp"
#include "twac/partitions.hpp"
#include "twac/potential.hpp"
#include "twac/solver.hpp"

using namespace twac;

namespace {

const Potential& pot() {
  static Potential p = symmetric_well();
  return p;
}

void BM_PotentialGrad(benchmark::State& state) {
  Vec2 u{0.3, -0.2};
  for (auto _ : state) {
    Vec2 g = pot().grad(u);
    benchmark::DoNotOptimize(g);
    u.x = 0.3 + 1e-9 * g.x;
  }
}
BENCHMARK(BM_PotentialGrad);

void BM_Heteroclinic(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    HeteroclinicProfile prof = heteroclinic(pot(), 0, 1, 12.0, n);
    benchmark::DoNotOptimize(prof.energy);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Heteroclinic)->Arg(256)->Arg(512)->Arg(1024)->Complexity();

void BM_MetricDistance(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    PathSample s = metric_distance(pot(), pot().wells[0], pot().wells[1], n);
    benchmark::DoNotOptimize(s.length);
  }
}
BENCHMARK(BM_MetricDistance)->Arg(64)->Arg(128);

void BM_RelaxSweeps(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = SurfaceTensions::from_tensions(0.9, 0.9, 0.9);
  Field init = sample_map(solve_problem1(bd, t), pot(), GridSpec::square(n, 1.0, DomainShape::disc));
  apply_trace(init, build_trace(bd, pot(), 16.0));
  RelaxOptions opts;
  opts.tol = 0.0;
  opts.max_iter = 32;
  for (auto _ : state) {
    try {
      Field f = relax(init, pot(), 16.0, opts);
      benchmark::DoNotOptimize(f.nx);
    } catch (const ConvergenceError&) {
      // tol 0 never converges: each call costs exactly max_iter sweeps
    }
  }
  state.SetItemsProcessed(state.iterations() * opts.max_iter * static_cast<long>(n) * n);
}
BENCHMARK(BM_RelaxSweeps)->Arg(128)->Arg(256);

void BM_Energy(benchmark::State& state) {
  Field f = sample_constant(pot().wells[0], GridSpec::square(512, 1.0, DomainShape::disc));
  for (auto _ : state) {
    double e = energy(f, pot(), 16.0);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_Energy);

void BM_SolveProblem1(benchmark::State& state) {
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = SurfaceTensions::from_tensions(1.0, 2.0, 3.0);
  for (auto _ : state) {
    PartitionNetwork net = solve_problem1(bd, t);
    benchmark::DoNotOptimize(net.cost);
  }
}
BENCHMARK(BM_SolveProblem1);

void BM_MultiwayCutOracle(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = SurfaceTensions::from_tensions(0.5, 0.5, 0.5);
  for (auto _ : state) {
    double v = multiway_cut_oracle(bd, t, n);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_MultiwayCutOracle)->Arg(128)->Arg(256);

void BM_ClassifyBlowdown(benchmark::State& state) {
  PairwiseCosts pc;
  pc.c12 = pc.c13 = pc.c23 = 1.837;
  pc.strict_triangle = true;
  JunctionMap map = make_junction_map(junction_angles(pc.c12, pc.c13, pc.c23), 0.3, {0, 1, 2});
  Field f = sample_map(map, pot(), GridSpec::square(256, 4.0, DomainShape::disc));
  for (auto _ : state) {
    BlowdownReport rep = classify_blowdown(f, pot(), pc, {1.0, 2.0, 3.5});
    benchmark::DoNotOptimize(rep.best_distance);
  }
}
BENCHMARK(BM_ClassifyBlowdown);

}  // namespace

BENCHMARK_MAIN();
