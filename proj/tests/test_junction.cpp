#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twac/errors.hpp"
#include "twac/geodesics.hpp"
#include "twac/junction.hpp"
#include "twac/partitions.hpp"

using namespace twac;

TEST_CASE("surface tensions solve the linear system exactly") {
  SurfaceTensions t = surface_tensions(3.0, 4.0, 5.0);
  CHECK(t.t1 == 1.0);
  CHECK(t.t2 == 2.0);
  CHECK(t.t3 == 3.0);
  // reconstruction recovers the costs exactly
  CHECK(t.t1 + t.t2 == t.c12);
  CHECK(t.t1 + t.t3 == t.c13);
  CHECK(t.t2 + t.t3 == t.c23);
}

TEST_CASE("equal costs give equal tensions") {
  SurfaceTensions t = surface_tensions(1.75, 1.75, 1.75);
  CHECK(t.t1 == doctest::Approx(0.875));
  CHECK(t.t2 == doctest::Approx(0.875));
  CHECK(t.t3 == doctest::Approx(0.875));
}

TEST_CASE("triangle equality raises a degenerate tension error") {
  CHECK_THROWS_AS(surface_tensions(5.0, 2.0, 3.0), DegenerateTensionError);
}

TEST_CASE("equal costs give three 2 pi / 3 angles") {
  auto a = junction_angles(2.0, 2.0, 2.0);
  for (double alpha : a) CHECK(std::abs(alpha - 2.0 * pi() / 3.0) < 1e-9);
  CHECK(std::abs(a[0] + a[1] + a[2] - 2.0 * pi()) < 1e-12);
}

TEST_CASE("(5,4,3) angles match the reference and the independent scan") {
  auto a = junction_angles(5.0, 4.0, 3.0);
  CHECK(a[0] * 180.0 / pi() == doctest::Approx(143.130102).epsilon(1e-6));
  CHECK(a[1] * 180.0 / pi() == doctest::Approx(126.869898).epsilon(1e-6));
  CHECK(a[2] * 180.0 / pi() == doctest::Approx(90.0).epsilon(1e-6));
  auto scan = oracles::sine_system_scan(5.0, 4.0, 3.0);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(a[k] - scan[k]) < 1e-6);
  // sine law holds
  double r1 = std::sin(a[0]) / 3.0, r2 = std::sin(a[1]) / 4.0, r3 = std::sin(a[2]) / 5.0;
  CHECK(std::abs(r1 - r2) < 1e-9);
  CHECK(std::abs(r2 - r3) < 1e-9);
}

TEST_CASE("near-degenerate costs shrink the opposite angle") {
  auto a = junction_angles(4.995, 4.0, 1.0);
  CHECK(a[2] < 0.15);  // alpha3 -> 0 as c12 -> c13 + c23
  CHECK(a[0] + a[1] + a[2] == doctest::Approx(2.0 * pi()).epsilon(1e-12));
}

TEST_CASE("measured costs of the symmetric well give the 2 pi / 3 junction") {
  Potential pot = symmetric_well();
  PairwiseCosts c = pairwise_costs(pot, 128);
  auto a = junction_angles(c.c12, c.c13, c.c23);
  for (double alpha : a) CHECK(std::abs(alpha - 2.0 * pi() / 3.0) < 1e-6);
}

TEST_CASE("angles are invariant under cost rescaling") {
  auto a = junction_angles(5.0, 4.0, 3.0);
  auto b = junction_angles(5.0 * 7.25, 4.0 * 7.25, 3.0 * 7.25);
  for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
}

TEST_CASE("junction map sectors and conventions") {
  auto angles = junction_angles(2.0, 2.0, 2.0);
  JunctionMap map = make_junction_map(angles, 0.0, {0, 1, 2});
  // sector of well 0 spans [0, alpha1) starting at angle 0
  CHECK(map.label_at({1.0, 0.1}) == 0);
  CHECK(map.label_at(rotate({1.0, 0.0}, 0.5 * angles[0])) == 0);
  CHECK(map.label_at(rotate({1.0, 0.0}, angles[0] + 0.1)) == 1);
  CHECK(map.label_at(rotate({1.0, 0.0}, angles[0] + angles[1] + 0.1)) == 2);
  // a point exactly on a ray belongs to the sector starting there (ccw-adjacent)
  CHECK(map.label_at({1.0, 0.0}) == 0);
}

TEST_CASE("junction map rotation equivariance") {
  auto angles = junction_angles(5.0, 4.0, 3.0);
  JunctionMap a = make_junction_map(angles, 0.0, {0, 1, 2});
  JunctionMap b = make_junction_map(angles, pi(), {0, 1, 2});
  for (int k = 0; k < 64; ++k) {
    Vec2 x = rotate({1.0, 0.0}, 2.0 * pi() * (k + 0.31) / 64.0);
    CHECK(b.label_at(rotate(x, pi())) == a.label_at(x));
  }
}

TEST_CASE("deep sector evaluation returns that sector's well") {
  auto angles = junction_angles(2.0, 2.0, 2.0);
  JunctionMap map = make_junction_map(angles, 0.25, {2, 0, 1});
  Vec2 deep = rotate({10.0, 0.0}, 0.25 + angles[2] + 0.5 * angles[0]);
  CHECK(map.label_at(deep) == 0);
}

TEST_CASE("junction map config round trip") {
  auto angles = junction_angles(5.0, 4.0, 3.0);
  JunctionMap map = make_junction_map(angles, 0.7, {1, 2, 0}, {0.25, -0.125});
  JunctionMap back = JunctionMap::from_config(map.to_config());
  CHECK(back.center.x == map.center.x);
  for (int k = 0; k < 3; ++k) {
    CHECK(back.ray_angles[k] == map.ray_angles[k]);
    CHECK(back.labels[k] == map.labels[k]);
  }
}

TEST_CASE("perimeter energy of the central symmetric junction") {
  // equal costs c = 1 (tensions 1/2 each): three unit radii cost 3
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = SurfaceTensions::from_tensions(0.5, 0.5, 0.5);
  PartitionNetwork net = solve_problem1(bd, t);
  CHECK(perimeter_energy(net, t) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(net.cost == doctest::Approx(perimeter_energy(net, t)).epsilon(1e-12));
}

TEST_CASE("perimeter energy of a single chord") {
  double theta = 0.6;
  BoundaryData bd = BoundaryData::two_arcs(-theta, theta, 0, 1);
  SurfaceTensions t = surface_tensions(1.5, 2.0, 2.5);
  PartitionNetwork net = solve_problem1(bd, t);
  double chord = 2.0 * std::sin(theta);
  CHECK(perimeter_energy(net, t) == doctest::Approx(t.c12 * chord).epsilon(1e-12));
}

TEST_CASE("perimeter energy rejects inconsistent labels") {
  PartitionNetwork net;
  net.segments.push_back({{0, 0}, {1, 0}, 1, 1});
  SurfaceTensions t = SurfaceTensions::from_tensions(1, 1, 1);
  CHECK_THROWS_AS(perimeter_energy(net, t), ValidationError);
}

TEST_CASE("wetted network cost matches the hand-integrated arc sum") {
  // symmetric case, equal costs c = 1: cusp distance d, radius d/tan(pi/6),
  // each arc subtends pi/3; cost = 3 c (1 - d) + 3 t r theta
  BoundaryData bd = BoundaryData::three_arcs(pi() / 2, 7 * pi() / 6, 11 * pi() / 6);
  SurfaceTensions t = SurfaceTensions::from_tensions(0.5, 0.5, 0.5);
  double delta = 4e-3;
  WettedNetwork wet = solve_problem2(bd, t, delta);
  double d = std::sqrt(delta / 0.48376344232194214);  // gray area coefficient at d = 1
  double r = d / std::tan(pi() / 6.0);
  double hand = 3.0 * (1.0 - d) + 3.0 * 0.5 * r * (pi() / 3.0);
  CHECK(perimeter_energy(wet, t) == doctest::Approx(hand).epsilon(1e-6));
  CHECK(wet.cost == doctest::Approx(hand).epsilon(1e-6));
}
