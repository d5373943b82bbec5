#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "twac/errors.hpp"
#include "twac/field.hpp"
#include "twac/junction.hpp"
#include "twac/potential.hpp"
#include "twac/solver.hpp"

using namespace twac;

TEST_CASE("disc mask marks interior, staircase ring and outside") {
  GridSpec spec = GridSpec::square(64, 1.0, DomainShape::disc);
  Field f = make_field(spec);
  int interior = 0, boundary = 0, outside = 0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      switch (f.kind(i, j)) {
        case NodeKind::interior: ++interior; break;
        case NodeKind::boundary: ++boundary; break;
        default: ++outside;
      }
    }
  CHECK(interior > 2500);
  CHECK(boundary > 100);
  CHECK(outside > 500);
  CHECK(f.disc_radius() == doctest::Approx(1.0));
  CHECK(norm(f.center()) < 1e-12);
}

TEST_CASE("sample_map of the symmetric junction map has three regions meeting at the center") {
  Potential pot = symmetric_well();
  auto angles = junction_angles(2.0, 2.0, 2.0);
  JunctionMap map = make_junction_map(angles, pi() / 2, {0, 1, 2});
  Field f = sample_map(map, pot, GridSpec::square(256, 1.0, DomainShape::disc));
  int counts[3] = {0, 0, 0};
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      for (int l = 0; l < 3; ++l)
        if (dist(f.at(i, j), pot.wells[l]) < 1e-12) ++counts[l];
    }
  int total = counts[0] + counts[1] + counts[2];
  for (int l = 0; l < 3; ++l) CHECK(std::abs(counts[l] - total / 3.0) / total < 0.02);
  // all three labels appear within a small ball around the center
  bool seen[3] = {false, false, false};
  for (int dj = -3; dj <= 3; ++dj)
    for (int di = -3; di <= 3; ++di) {
      Vec2 v = f.at(f.nx / 2 + di, f.ny / 2 + dj);
      for (int l = 0; l < 3; ++l)
        if (dist(v, pot.wells[l]) < 1e-12) seen[l] = true;
    }
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[2]);
}

TEST_CASE("constant map samples to the well everywhere") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(32, 1.0, DomainShape::disc));
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) CHECK(dist(f.at(i, j), pot.wells[0]) == 0.0);
}

TEST_CASE("field file round trip is bit identical") {
  Potential pot = symmetric_well();
  auto angles = junction_angles(5.0, 4.0, 3.0);
  Field f = sample_map(make_junction_map(angles, 0.3, {2, 0, 1}), pot,
                       GridSpec::square(48, 1.0, DomainShape::disc));
  f.at(5, 7) = {0.12345678901234567, -0.98765432109876543};
  f.bc = BcKind::dirichlet;
  write_field(f, "/tmp/twac_test_field.twac");
  Field g = read_field("/tmp/twac_test_field.twac");
  CHECK(g.nx == f.nx);
  CHECK(g.ny == f.ny);
  CHECK(g.spacing == f.spacing);
  CHECK(g.origin.x == f.origin.x);
  CHECK(g.bc == BcKind::dirichlet);
  CHECK(g.domain == DomainShape::disc);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    CHECK(g.values[k].x == f.values[k].x);
    CHECK(g.values[k].y == f.values[k].y);
  }
}

TEST_CASE("truncated field file reports a parse error with an offset") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[1], GridSpec::square(16, 1.0, DomainShape::rectangle));
  write_field(f, "/tmp/twac_test_trunc.twac");
  std::ifstream in("/tmp/twac_test_trunc.twac", std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::ofstream out("/tmp/twac_test_trunc.twac", std::ios::binary);
  out << content.substr(0, content.size() / 2);
  out.close();
  bool threw = false;
  try {
    read_field("/tmp/twac_test_trunc.twac");
  } catch (const ParseError& e) {
    threw = true;
    CHECK(e.byte_offset > 0);
  }
  CHECK(threw);
}

TEST_CASE("unknown field file version is a version error") {
  std::ofstream out("/tmp/twac_test_ver.twac", std::ios::binary);
  out << "TWAC9\n4 4 1 0 0 rect neumann\n";
  out.close();
  CHECK_THROWS_AS(read_field("/tmp/twac_test_ver.twac"), VersionError);
}

TEST_CASE("garbage magic is a parse error") {
  std::ofstream out("/tmp/twac_test_magic.twac", std::ios::binary);
  out << "HELLO\n";
  out.close();
  CHECK_THROWS_AS(read_field("/tmp/twac_test_magic.twac"), ParseError);
}

TEST_CASE("pgm snapshot has the right header and size") {
  Potential pot = symmetric_well();
  Field f = sample_map(make_junction_map(junction_angles(2, 2, 2), 0.0, {0, 1, 2}), pot,
                       GridSpec::square(40, 1.0, DomainShape::disc));
  write_label_pgm(f, pot, "/tmp/twac_test.pgm");
  std::ifstream in("/tmp/twac_test.pgm", std::ios::binary);
  std::string line;
  std::getline(in, line);
  CHECK(line == "P5");
  std::getline(in, line);
  CHECK(line == "40 40");
  std::getline(in, line);
  CHECK(line == "255");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(rest.size() == 1600);
}

TEST_CASE("blowdown with factor 1 is the identity up to resampling error") {
  Potential pot = symmetric_well();
  Field f = sample_map(make_junction_map(junction_angles(2, 2, 2), 0.4, {0, 1, 2}), pot,
                       GridSpec::square(96, 1.0, DomainShape::disc));
  Field g = blowdown(f, 1.0, f.spec());
  double worst = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      if (f.kind(i, j) != NodeKind::outside)
        worst = std::max(worst, dist(f.at(i, j), g.at(i, j)));
  CHECK(worst < 1e-12);
}

TEST_CASE("junction maps are blowdown fixed points") {
  Potential pot = symmetric_well();
  JunctionMap map = make_junction_map(junction_angles(2, 2, 2), 0.4, {0, 1, 2});
  Field f = sample_map(map, pot, GridSpec::square(128, 2.0, DomainShape::disc));
  GridSpec target = GridSpec::square(64, 1.0, DomainShape::disc);
  Field g = blowdown(f, 2.0, target);
  Field exact = sample_map(map, pot, target);
  // away from the sector boundaries the cone is reproduced exactly
  int mismatched = 0, total = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.kind(i, j) == NodeKind::outside) continue;
      ++total;
      if (dist(g.at(i, j), exact.at(i, j)) > 1e-9) ++mismatched;
    }
  CHECK(mismatched < 0.05 * total);  // only interface-adjacent nodes differ
}

TEST_CASE("blowdown out of the source footprint throws") {
  Potential pot = symmetric_well();
  Field f = sample_constant(pot.wells[0], GridSpec::square(32, 1.0, DomainShape::disc));
  GridSpec target = GridSpec::square(32, 1.0, DomainShape::disc);
  CHECK_THROWS_AS(blowdown(f, 4.0, target), OutOfFootprintError);
}

TEST_CASE("slab blowdown sharpens the transition by the factor") {
  Potential pot = symmetric_well();
  HeteroclinicProfile prof = heteroclinic(pot, 0, 1, 12.0, 512);
  GridSpec spec = GridSpec::square(256, 8.0, DomainShape::rectangle);
  Field f = make_field(spec);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) f.at(i, j) = prof.at(f.pos(i, j).x);
  auto width = [&](const Field& g) {
    // nodes along the middle row farther than 0.05 from both wells
    int count = 0;
    int j = g.ny / 2;
    for (int i = 0; i < g.nx; ++i) {
      Vec2 v = g.at(i, j);
      if (dist(v, pot.wells[0]) > 0.05 && dist(v, pot.wells[1]) > 0.05) ++count;
    }
    return count * g.spacing;
  };
  GridSpec target = GridSpec::square(256, 2.0, DomainShape::rectangle);
  Field g = blowdown(f, 4.0, target);
  double w_src = width(f), w_dst = width(g);
  CHECK(w_dst < w_src / 3.0);
  CHECK(w_dst > w_src / 6.0);
}
