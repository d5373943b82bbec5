#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twac/diagnostics.hpp"
#include "twac/errors.hpp"
#include "twac/field.hpp"
#include "twac/potential.hpp"
#include "twac/rng.hpp"
#include "twac/solver.hpp"

using namespace twac;

namespace {

Field slab(const Potential& pot, const HeteroclinicProfile& prof, int n, double extent,
           double angle = 0.0, double offset = 0.0) {
  GridSpec spec = GridSpec::square(n, extent, DomainShape::disc);
  Field f = make_field(spec, BcKind::dirichlet);
  Vec2 normal{-std::sin(angle), std::cos(angle)};
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      f.at(i, j) = prof.at(dot(f.pos(i, j), normal) - offset);
  return f;
}

PairwiseCosts symmetric_costs(double c) {
  PairwiseCosts pc;
  pc.c12 = pc.c13 = pc.c23 = c;
  pc.strict_triangle = true;
  pc.margin = 0.5;
  return pc;
}

}  // namespace

TEST_CASE("stress tensor vanishes identically on a constant field") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[1], GridSpec::square(48, 1.0, DomainShape::disc));
  StressField s = stress_tensor(f, pot);
  CHECK(s.max_divergence == 0.0);
  for (const Mat2& t : s.tensor) {
    CHECK(t.xx == 0.0);
    CHECK(t.yy == 0.0);
  }
}

TEST_CASE("slab stress: T11 vanishes by the first integral") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 4096);
  Field f = slab(pot, prof, 256, 6.0, pi() / 2);  // transition along x
  StressField s = stress_tensor(f, pot);
  double worst = 0.0;
  for (int j = 2; j < f.ny - 2; ++j)
    for (int i = 2; i < f.nx - 2; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      // T11 = |u_x|^2 - (|grad u|^2/2 + W) = |zeta'|^2/2 - W = 0 pointwise
      worst = std::max(worst, std::abs(s.tensor[f.idx(i, j)].xx));
    }
  CHECK(worst < 5e-3);
}

TEST_CASE("stress divergence shrinks under refinement") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 4096);
  double d[2];
  int idx = 0;
  for (int n : {128, 256}) {
    Field f = slab(pot, prof, n, 6.0, pi() / 2);
    d[idx++] = stress_tensor(f, pot).max_divergence;
  }
  CHECK(d[1] < d[0] / 1.5);
}

TEST_CASE("pohozaev residual of a constant field is exactly zero") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(64, 4.0, DomainShape::disc));
  CHECK(pohozaev_residual(f, pot, 2.0) == 0.0);
}

TEST_CASE("pohozaev residual of the exact slab shrinks with the grid") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 4096);
  double r[2];
  int idx = 0;
  for (int n : {128, 256}) r[idx++] = std::abs(pohozaev_residual(slab(pot, prof, n, 6.0), pot, 3.0));
  CHECK(r[1] < r[0] / 1.5);
  CHECK(r[1] < 0.05 * prof.energy);
}

TEST_CASE("pohozaev residual of a random field is order one (sanity inversion)") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(96, 4.0, DomainShape::disc));
  Rng rng(23);
  for (Vec2& v : f.values) v += Vec2{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
  CHECK(std::abs(pohozaev_residual(f, pot, 2.0)) > 1.0);
}

TEST_CASE("circle outside the domain is rejected") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(64, 1.0, DomainShape::disc));
  CHECK_THROWS_AS(pohozaev_residual(f, pot, 1.5), ValidationError);
  CHECK_THROWS_AS(radial_energy(f, 0.5, 1.5), ValidationError);
  CHECK_THROWS_AS(circle_profile(f, pot, 2.0), ValidationError);
  CHECK_THROWS_AS(radial_energy(f, 0.7, 0.7), ValidationError);
}

TEST_CASE("wtilde vanishes on constant fields and hits c12 on slabs") {
  Potential pot = symmetric_well();
  Field c = sample_constant(pot.wells[2], GridSpec::square(64, 8.0, DomainShape::disc));
  WtildeProfile wp = wtilde_profile(c, pot, {2.0, 4.0, 6.0});
  for (double v : wp.values) CHECK(v == 0.0);

  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 2048);
  Field s = slab(pot, prof, 512, 40.0);
  WtildeProfile ws = wtilde_profile(s, pot, {10.0, 20.0, 38.0});
  // chord average tends to 2 * (c12 / 2) = c12
  CHECK(std::abs(ws.values.back() - prof.energy) / prof.energy < 0.05);
}

TEST_CASE("equipartition defect vanishes on slabs and constants") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 4096);
  Field s = slab(pot, prof, 512, 8.0);
  DefectProfile d = equipartition_defect(s, pot, {2.0, 4.0, 7.0});
  // defect per unit interface length is pure discretization error
  for (std::size_t k = 0; k < d.values.size(); ++k) CHECK(d.values[k] < 0.01 * d.radii[k]);
  Field c = sample_constant(pot.wells[0], GridSpec::square(64, 8.0, DomainShape::disc));
  DefectProfile dc = equipartition_defect(c, pot, {2.0, 4.0});
  CHECK(dc.values[0] == 0.0);
  CHECK(dc.values[1] == 0.0);
}

TEST_CASE("radial energy separates cones from slabs") {
  Potential pot = symmetric_well();
  JunctionMap map = make_junction_map(junction_angles(2, 2, 2), 0.2, {0, 1, 2});
  // mollify both fields identically: raw sampled jumps alias a staircase
  // component into the radial derivative
  auto mollify = [](Field f) {
    for (int pass = 0; pass < 12; ++pass) {
      Field g = f;
      for (int j = 1; j < f.ny - 1; ++j)
        for (int i = 1; i < f.nx - 1; ++i)
          g.at(i, j) = (f.at(i, j) * 4.0 + f.at(i - 1, j) + f.at(i + 1, j) + f.at(i, j - 1) +
                        f.at(i, j + 1)) *
                       0.125;
      f = g;
    }
    return f;
  };
  Field cone = mollify(sample_map(map, pot, GridSpec::square(256, 8.0, DomainShape::disc)));
  double cone_term = radial_energy(cone, 2.0, 6.0);
  // a cone through the origin has an almost tangential gradient everywhere;
  // an off-center interface line does not
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 1024);
  Field s = mollify(slab(pot, prof, 256, 8.0, 0.0, 3.0));
  double slab_term = radial_energy(s, 2.0, 6.0);
  CHECK(slab_term > 0.0);
  CHECK(slab_term > 10.0 * cone_term);
}

TEST_CASE("distance to the junction class vanishes on its own members") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  JunctionMap map = make_junction_map(junction_angles(pc.c12, pc.c13, pc.c23), 0.4, {2, 0, 1});
  Field f = sample_map(map, pot, GridSpec::square(384, 1.0, DomainShape::disc));
  auto [d, best] = distance_to_A(f, pot, pc);
  // only scan-step interface slivers contribute
  CHECK(d / (2.0 * 1.0 * 1.0) < 0.01);
}

TEST_CASE("distance to the class is rotation equivariant") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  auto angles = junction_angles(pc.c12, pc.c13, pc.c23);
  double rot = 37.0 * pi() / 180.0;
  Field f = sample_map(make_junction_map(angles, rot, {0, 1, 2}), pot,
                       GridSpec::square(384, 1.0, DomainShape::disc));
  auto [d, best] = distance_to_A(f, pot, pc);
  CHECK(d / 2.0 < 0.01);
  // the recovered rotation matches the generator up to the scan step
  double got = best.ray_angles[0];
  double err = std::abs(angle_diff(got, rot));
  CHECK(err < 2.0 * pi() / 720 + 1e-9);
}

TEST_CASE("classification: junction map samples classify as triple junctions") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  auto angles = junction_angles(pc.c12, pc.c13, pc.c23);
  Field f = sample_map(make_junction_map(angles, 1.1, {1, 0, 2}), pot,
                       GridSpec::square(256, 4.0, DomainShape::disc));
  BlowdownReport rep = classify_blowdown(f, pot, pc, {1.0, 2.0, 3.5});
  CHECK(rep.classification == BlowdownClass::triple_junction);
  CHECK(rep.junction_fit.has_value());
}

TEST_CASE("classification: slabs classify as half planes") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 1024);
  PairwiseCosts pc = symmetric_costs(prof.energy);
  Field f = slab(pot, prof, 256, 8.0, 0.35, 0.4);
  BlowdownReport rep = classify_blowdown(f, pot, pc, {2.0, 4.0, 7.0});
  CHECK(rep.classification == BlowdownClass::half_plane);
  CHECK(rep.halfplane_fit.has_value());
  CHECK(std::abs(angle_diff(rep.halfplane_fit->line_angle, 0.35)) < 0.05);
}

TEST_CASE("classification: constants classify as constants") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  Field f = sample_constant(pot.wells[1], GridSpec::square(128, 4.0, DomainShape::disc));
  BlowdownReport rep = classify_blowdown(f, pot, pc, {1.0, 2.0, 3.5});
  CHECK(rep.classification == BlowdownClass::constant);
  CHECK(rep.constant_label == 1);
  CHECK(rep.best_distance == 0.0);
}

TEST_CASE("blowdown report export") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  Field f = sample_constant(pot.wells[0], GridSpec::square(96, 4.0, DomainShape::disc));
  BlowdownReport rep = classify_blowdown(f, pot, pc, {1.0, 2.0});
  std::string csv = rep.to_csv();
  CHECK(csv.find("R,wtilde,equipartition_defect,radial_term") == 0);
  Config sum = rep.summary();
  CHECK(sum.get("blowdown_report", "classification") == "constant");
}

TEST_CASE("circle profile of a slab: two windows, each near c12") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 2048);
  Field f = slab(pot, prof, 768, 40.0);
  CircleProfile cp = circle_profile(f, pot, 34.0);
  CHECK(std::abs(cp.full_energy - 2.0 * prof.energy) / (2.0 * prof.energy) < 0.05);
  REQUIRE(cp.windows.size() == 2);
  for (const auto& win : cp.windows) {
    CHECK(std::abs(win.energy - prof.energy) / prof.energy < 0.05);
    CHECK(win.label_before != win.label_after);
    CHECK(win.sup_dist < 0.08);
  }
  CHECK(cp.hit_angles.size() == 4);  // two crossings per transition
}

TEST_CASE("circle profile of a constant field is quiet") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(64, 4.0, DomainShape::disc));
  CircleProfile cp = circle_profile(f, pot, 2.0);
  CHECK(cp.full_energy == 0.0);
  CHECK(cp.hit_angles.empty());
  CHECK(cp.windows.empty());
}

namespace {

// shared relaxed junction field for the blowdown-flavored tests
const Field& relaxed_junction_field() {
  static Field field = [] {
    Potential pot = symmetric_well();
    auto angles = junction_angles(2.0, 2.0, 2.0);
    JunctionMap map = make_junction_map(angles, pi() / 2, {0, 1, 2});
    Field f = sample_map(map, pot, GridSpec::square(256, 1.0, DomainShape::disc));
    BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
    apply_trace(f, build_trace(bd, pot, 16.0));
    RelaxOptions opts;
    opts.tol = 1e-3;
    opts.max_iter = 60000;
    return relax(f, pot, 16.0, opts);
  }();
  return field;
}

}  // namespace

TEST_CASE("circle image winds around the well centroid for junction data") {
  Potential pot = symmetric_well();
  CircleProfile cp = circle_profile(relaxed_junction_field(), pot, 0.85);
  int w = winding_number(circle_image(cp), {0.0, 0.0});
  CHECK(std::abs(w) == 1);
}

TEST_CASE("distance to the junction class is nonincreasing across blowdown windows") {
  Potential pot = symmetric_well();
  PairwiseCosts pc = symmetric_costs(1.837);
  Field U = relaxed_junction_field().rescaled(16.0);
  double prev = 1e300;
  for (double r : {4.0, 8.0, 16.0}) {
    GridSpec window = GridSpec::square(192, r, DomainShape::disc);
    Field w = blowdown(U, 1.0, window);
    auto [d, best] = distance_to_A(w, pot, pc, 360);
    double per_area = d / (2.0 * r * r);
    CHECK(per_area <= prev * 1.05);
    prev = per_area;
  }
}
