#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twac/errors.hpp"
#include "twac/field.hpp"
#include "twac/potential.hpp"
#include "twac/rng.hpp"
#include "twac/solver.hpp"

using namespace twac;

namespace {

Field slab_field(const Potential& pot, const HeteroclinicProfile& prof, const GridSpec& spec) {
  Field f = make_field(spec, BcKind::dirichlet);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) f.at(i, j) = prof.at(f.pos(i, j).x);
  return f;
}

}  // namespace

TEST_CASE("energy of a constant well field is zero") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[2], GridSpec::square(64, 1.0, DomainShape::disc));
  CHECK(energy(f, pot, 8.0) == 0.0);
}

TEST_CASE("slab field energy is height times the line tension") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 2048);
  // tall rectangle [-8,8] x [-4,4] at R = 1
  GridSpec spec;
  spec.nx = 513;
  spec.ny = 257;
  spec.spacing = 16.0 / 512;
  spec.origin = {-8.0, -4.0};
  spec.domain = DomainShape::rectangle;
  Field f = slab_field(pot, prof, spec);
  double H = 8.0;
  CHECK(std::abs(energy(f, pot, 1.0) - H * prof.energy) / (H * prof.energy) < 0.01);
}

TEST_CASE("energy is invariant under relabeling for the symmetric well") {
  Potential pot = symmetric_well();
  auto angles = junction_angles(2.0, 2.0, 2.0);
  Field a = sample_map(make_junction_map(angles, 0.2, {0, 1, 2}), pot,
                       GridSpec::square(96, 1.0, DomainShape::disc));
  Field b = sample_map(make_junction_map(angles, 0.2, {1, 2, 0}), pot,
                       GridSpec::square(96, 1.0, DomainShape::disc));
  CHECK(energy(a, pot, 16.0) == doctest::Approx(energy(b, pot, 16.0)).epsilon(1e-12));
}

TEST_CASE("a constant well field is a fixed point of relaxation") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(48, 1.0, DomainShape::disc));
  RelaxInfo info;
  Field g = relax(f, pot, 8.0, {}, &info);
  CHECK(info.iterations <= 1);
  for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(dist(f.values[k], g.values[k]) == 0.0);
}

TEST_CASE("1D slab with clamped ends relaxes to the heteroclinic") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 8.0, 2048);
  // grid over [-8,8] x [-1,1], R = 1, Dirichlet; init with a crude ramp
  GridSpec spec;
  spec.nx = 257;
  spec.ny = 33;
  spec.spacing = 16.0 / 256;
  spec.origin = {-8.0, -1.0};
  spec.domain = DomainShape::rectangle;
  Field f = make_field(spec, BcKind::dirichlet);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      double x = f.pos(i, j).x;
      double s = std::clamp(0.5 + x / 6.0, 0.0, 1.0);
      f.at(i, j) = pot.wells[0] * (1.0 - s) + pot.wells[1] * s;
    }
  // clamp the boundary to the true profile
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      if (f.kind(i, j) == NodeKind::boundary) f.at(i, j) = prof.at(f.pos(i, j).x);
  RelaxOptions opts;
  opts.tol = 2e-5;
  opts.max_iter = 200000;
  Field g = relax(f, pot, 1.0, opts);
  double sup = 0.0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i)
      sup = std::max(sup, dist(g.at(i, j), prof.at(g.pos(i, j).x)));
  CHECK(sup < 1e-3);
}

TEST_CASE("relaxation energy is monotone sweep by sweep") {
  Potential pot = symmetric_well();
  auto angles = junction_angles(2.0, 2.0, 2.0);
  Field f = sample_map(make_junction_map(angles, pi() / 2, {0, 1, 2}), pot,
                       GridSpec::square(64, 1.0, DomainShape::disc));
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  apply_trace(f, build_trace(bd, pot, 8.0));
  // step a few sweeps manually via max_iter budgets and watch the energy
  double prev = energy(f, pot, 8.0);
  Field cur = f;
  for (int step = 0; step < 20; ++step) {
    RelaxOptions opts;
    opts.tol = 0.0;  // never converge; run exactly one sweep
    opts.max_iter = 1;
    opts.energy_check_every = 1;
    try {
      cur = relax(cur, pot, 8.0, opts);
    } catch (const ConvergenceError&) {
      // expected: one sweep cannot hit tol = 0
    }
    double e = energy(cur, pot, 8.0);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
}

TEST_CASE("maximum principle analogue bounds the relaxed field") {
  Potential pot = symmetric_well();
  auto angles = junction_angles(2.0, 2.0, 2.0);
  Field f = sample_map(make_junction_map(angles, pi() / 2, {0, 1, 2}), pot,
                       GridSpec::square(96, 1.0, DomainShape::disc));
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  apply_trace(f, build_trace(bd, pot, 16.0));
  double init_max = 0.0;
  for (const Vec2& v : f.values) init_max = std::max(init_max, norm(v));
  RelaxOptions opts;
  opts.tol = 5e-4;
  opts.max_iter = 100000;
  Field g = relax(f, pot, 16.0, opts);
  double out_max = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.kind(i, j) != NodeKind::outside) out_max = std::max(out_max, norm(g.at(i, j)));
  CHECK(out_max <= std::max(1.0, init_max) + 1e-6);
}

TEST_CASE("relaxed disc energy grows linearly in the radius") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = surface_tensions(1.837, 1.837, 1.837);
  PartitionNetwork net = solve_problem1(bd, t);
  double R = 16.0;
  Field f = sample_map(net, pot, GridSpec::square(128, 1.0, DomainShape::disc));
  apply_trace(f, build_trace(bd, pot, R));
  RelaxOptions opts;
  opts.tol = 1e-3;
  opts.max_iter = 60000;
  Field g = relax(f, pot, R, opts);
  // E(U, B_r)/r bounded above uniformly over r in [R/4, R] (blowup coords)
  Field U = g.rescaled(R);
  double bound = 3.0 * (t.c12 + t.c13 + t.c23);
  for (double r : {R / 4, R / 2, 0.75 * R, 0.95 * R})
    CHECK(energy_in_ball(U, pot, 1.0, r) / r <= bound);
}

TEST_CASE("relaxed energy is stable under grid refinement") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = surface_tensions(1.837, 1.837, 1.837);
  PartitionNetwork net = solve_problem1(bd, t);
  double R = 12.0;
  RelaxOptions opts;
  opts.tol = 1e-3;
  opts.max_iter = 60000;
  double e[2];
  int idx = 0;
  for (int n : {96, 192}) {
    Field f = sample_map(net, pot, GridSpec::square(n, 1.0, DomainShape::disc));
    apply_trace(f, build_trace(bd, pot, R));
    e[idx++] = energy(relax(f, pot, R, opts), pot, R);
  }
  CHECK(std::abs(e[0] - e[1]) / e[1] < 0.02);
}

TEST_CASE("trace of three equal arcs carries the three transition energies") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  TraceData trace = build_trace(bd, pot, 32.0);
  PairwiseCosts c = pairwise_costs(pot, 128);
  double total = c.c12 + c.c13 + c.c23;
  CHECK(std::abs(trace.boundary_energy(pot) - total) / total < 0.10);
}

TEST_CASE("single-label trace is constant with zero boundary energy") {
  Potential pot = symmetric_well();
  TraceData trace = build_trace(BoundaryData::single(1), pot, 16.0);
  for (const Vec2& v : trace.value) CHECK(dist(v, pot.wells[1]) == 0.0);
  CHECK(trace.boundary_energy(pot) == 0.0);
}

TEST_CASE("doubling R halves the trace transition width") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  auto width = [&](double R) {
    TraceData trace = build_trace(bd, pot, R, 1.0, 8192);
    int count = 0;
    for (const Vec2& v : trace.value) {
      double dmin = std::min({dist(v, pot.wells[0]), dist(v, pot.wells[1]),
                              dist(v, pot.wells[2])});
      if (dmin > 0.02) ++count;
    }
    return count;
  };
  int w32 = width(32.0), w64 = width(64.0);
  CHECK(std::abs(w64 - w32 / 2) <= w32 / 8 + 8);
}

TEST_CASE("arcs shorter than the transition width are rejected") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(0.0, 0.05, pi());
  CHECK_THROWS_AS(build_trace(bd, pot, 8.0), ArcTooShortError);
}

TEST_CASE("trace tangential derivative scales like R") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  auto max_slope = [&](double R) {
    TraceData t = build_trace(bd, pot, R, 1.0, 8192);
    double ds = 2.0 * pi() / t.theta.size();
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < t.theta.size(); ++k)
      worst = std::max(worst, dist(t.value[k + 1], t.value[k]) / ds);
    return worst;
  };
  double s32 = max_slope(32.0), s64 = max_slope(64.0);
  CHECK(s64 / s32 == doctest::Approx(2.0).epsilon(0.05));
  // |d_s h^R| <= C R with C set by the profile speed; max |zeta'| = sqrt(2 max W)
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 512);
  double wmax = 0.0;
  for (const Vec2& v : prof.value) wmax = std::max(wmax, pot.eval(v));
  CHECK(s64 <= 1.05 * std::sqrt(2.0 * wmax) * 64.0);
}

TEST_CASE("recovery schedule validation") {
  RecoverySchedule s = RecoverySchedule::defaults(64.0);
  CHECK_NOTHROW(s.validate());
  RecoverySchedule bad = s;
  bad.h = 0.6 * bad.eta;
  CHECK_THROWS_AS(bad.validate(), InvalidScheduleError);
  RecoverySchedule bad2 = s;
  bad2.h = 1.01 * bad2.eta * bad2.lambda * bad2.lambda;
  CHECK_THROWS_AS(bad2.validate(), InvalidScheduleError);
  // schedule below the valid R range: 2h <= eta fails for small R
  CHECK_THROWS_AS(RecoverySchedule::defaults(4.0).validate(), InvalidScheduleError);
}

TEST_CASE("recovery field: deep chamber nodes equal the chamber wells") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  PairwiseCosts c = pairwise_costs(pot, 128);
  SurfaceTensions t = surface_tensions(c.c12, c.c13, c.c23);
  PartitionNetwork net = solve_problem1(bd, t);
  double R = 64.0;
  TraceData trace = build_trace(bd, pot, R);
  Field f = recovery_field(net, trace, pot, R, RecoverySchedule::defaults(R), 256);
  // a point deep inside the first chamber
  Vec2 deep = rotate(Vec2{0.55, 0.0}, pi() / 2 + pi() / 3);
  int label = net.label_at(deep);
  CHECK(dist(f.sample(deep), pot.wells[label]) == 0.0);
}

TEST_CASE("recovery field energy sits between m0 and m0 + 15%") {
  Potential pot = symmetric_well();
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  PairwiseCosts c = pairwise_costs(pot, 128);
  SurfaceTensions t = surface_tensions(c.c12, c.c13, c.c23);
  PartitionNetwork net = solve_problem1(bd, t);
  double R = 64.0;
  TraceData trace = build_trace(bd, pot, R);
  Field f = recovery_field(net, trace, pot, R, RecoverySchedule::defaults(R), 512);
  double e = energy(f, pot, R);
  CHECK(e > net.cost);
  CHECK(e - net.cost < 0.15 * net.cost);
}

TEST_CASE("local minimality probe on a constant field") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(96, 1.0, DomainShape::disc));
  RelaxOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 100000;
  ProbeReport rep = local_min_probe(f, pot, 8.0, {{-0.4, -0.4}, {0.4, 0.4}}, 4, 0.05, 3, opts);
  CHECK(rep.min_delta >= -1e-10);
}

TEST_CASE("local minimality probe on the relaxed slab") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 8.0, 1024);
  GridSpec spec;
  spec.nx = 161;
  spec.ny = 81;
  spec.spacing = 0.1;
  spec.origin = {-8.0, -4.0};
  spec.domain = DomainShape::rectangle;
  Field f = slab_field(pot, prof, spec);
  RelaxOptions opts;
  opts.tol = 1e-5;
  opts.max_iter = 100000;
  Field g = relax(f, pot, 1.0, opts);
  ProbeReport rep = local_min_probe(g, pot, 1.0, {{-2.0, -2.0}, {2.0, 2.0}}, 4, 0.08, 5, opts);
  CHECK(rep.min_delta >= -opts.tol * rep.area);
}

TEST_CASE("probe flags an unrelaxed random field (sanity inversion)") {
  Potential pot = symmetric_well();
  Rng rng(17);
  Field f = sample_constant(pot.wells[0], GridSpec::square(96, 1.0, DomainShape::disc));
  for (Vec2& v : f.values) v += Vec2{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
  RelaxOptions opts;
  opts.tol = 1e-5;
  opts.max_iter = 100000;
  ProbeReport rep = local_min_probe(f, pot, 8.0, {{-0.4, -0.4}, {0.4, 0.4}}, 2, 0.05, 7, opts);
  CHECK(rep.min_delta < 0.0);
}
