#include "twac/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "twac/errors.hpp"

namespace twac {

GridSpec GridSpec::square(int n, double extent, DomainShape domain) {
  GridSpec s;
  s.nx = s.ny = n;
  s.spacing = 2.0 * extent / (n - 1);
  s.origin = {-extent, -extent};
  s.domain = domain;
  return s;
}

Vec2 Field::center() const {
  return {origin.x + 0.5 * (nx - 1) * spacing, origin.y + 0.5 * (ny - 1) * spacing};
}

double Field::disc_radius() const {
  return 0.5 * std::min(nx - 1, ny - 1) * spacing;
}

Vec2 Field::sample(Vec2 x) const {
  double fx = (x.x - origin.x) / spacing;
  double fy = (x.y - origin.y) / spacing;
  fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(ny - 1));
  int i = std::min(static_cast<int>(fx), nx - 2);
  int j = std::min(static_cast<int>(fy), ny - 2);
  double wx = fx - i, wy = fy - j;
  const Vec2 &a = at(i, j), &b = at(i + 1, j), &c = at(i, j + 1), &d = at(i + 1, j + 1);
  // locally constant patches sample bit-exactly (keeps W(const well) at 0)
  if (a.x == b.x && a.x == c.x && a.x == d.x && a.y == b.y && a.y == c.y && a.y == d.y) return a;
  return a * ((1 - wx) * (1 - wy)) + b * (wx * (1 - wy)) + c * ((1 - wx) * wy) + d * (wx * wy);
}

void Field::sample_gradient(Vec2 x, Vec2& du_dx, Vec2& du_dy) const {
  // central differences at the four surrounding nodes, bilinearly blended
  double fx = (x.x - origin.x) / spacing;
  double fy = (x.y - origin.y) / spacing;
  fx = std::clamp(fx, 1.0, static_cast<double>(nx - 2));
  fy = std::clamp(fy, 1.0, static_cast<double>(ny - 2));
  int i = std::min(static_cast<int>(fx), nx - 3);
  int j = std::min(static_cast<int>(fy), ny - 3);
  double wx = fx - i, wy = fy - j;
  auto gx = [&](int a, int b) { return (at(a + 1, b) - at(a - 1, b)) / (2.0 * spacing); };
  auto gy = [&](int a, int b) { return (at(a, b + 1) - at(a, b - 1)) / (2.0 * spacing); };
  du_dx = gx(i, j) * ((1 - wx) * (1 - wy)) + gx(i + 1, j) * (wx * (1 - wy)) +
          gx(i, j + 1) * ((1 - wx) * wy) + gx(i + 1, j + 1) * (wx * wy);
  du_dy = gy(i, j) * ((1 - wx) * (1 - wy)) + gy(i + 1, j) * (wx * (1 - wy)) +
          gy(i, j + 1) * ((1 - wx) * wy) + gy(i + 1, j + 1) * (wx * wy);
}

Field Field::rescaled(double factor) const {
  Field out = *this;
  out.spacing *= factor;
  out.origin = origin * factor;
  return out;
}

Field make_field(const GridSpec& spec, BcKind bc) {
  if (spec.nx < 4 || spec.ny < 4) throw ValidationError("make_field: grid too small");
  Field f;
  f.nx = spec.nx;
  f.ny = spec.ny;
  f.spacing = spec.spacing;
  f.origin = spec.origin;
  f.domain = spec.domain;
  f.bc = bc;
  f.values.assign(static_cast<std::size_t>(f.nx) * f.ny, Vec2{});
  f.mask.assign(static_cast<std::size_t>(f.nx) * f.ny, NodeKind::outside);

  if (spec.domain == DomainShape::rectangle) {
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i)
        f.mask[f.idx(i, j)] = (i == 0 || j == 0 || i == f.nx - 1 || j == f.ny - 1)
                                  ? NodeKind::boundary
                                  : NodeKind::interior;
    return f;
  }

  Vec2 c = f.center();
  double R = f.disc_radius();
  auto in_disc = [&](int i, int j) { return dist(f.pos(i, j), c) <= R + 1e-12; };
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i)
      if (in_disc(i, j)) f.mask[f.idx(i, j)] = NodeKind::interior;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      if (f.mask[f.idx(i, j)] == NodeKind::outside) continue;
      bool edge = (i == 0 || j == 0 || i == f.nx - 1 || j == f.ny - 1);
      if (!edge) {
        edge = f.mask[f.idx(i - 1, j)] == NodeKind::outside ||
               f.mask[f.idx(i + 1, j)] == NodeKind::outside ||
               f.mask[f.idx(i, j - 1)] == NodeKind::outside ||
               f.mask[f.idx(i, j + 1)] == NodeKind::outside;
      }
      if (edge) f.mask[f.idx(i, j)] = NodeKind::boundary;
    }
  return f;
}

Field sample_map(const std::function<int(Vec2)>& label_of, const Potential& pot,
                 const GridSpec& spec) {
  Field f = make_field(spec);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      int l = label_of(f.pos(i, j));
      f.at(i, j) = pot.wells[std::clamp(l, 0, 2)];
    }
  return f;
}

Field sample_map(const JunctionMap& map, const Potential& pot, const GridSpec& spec) {
  return sample_map([&](Vec2 x) { return map.label_at(x); }, pot, spec);
}

Field sample_map(const PartitionNetwork& network, const Potential& pot, const GridSpec& spec) {
  return sample_map([&](Vec2 x) { return network.label_at(x); }, pot, spec);
}

Field sample_constant(Vec2 well, const GridSpec& spec) {
  Field f = make_field(spec);
  std::fill(f.values.begin(), f.values.end(), well);
  return f;
}

void write_field(const Field& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write field file: " + path);
  out << "TWAC1\n";
  out << field.nx << ' ' << field.ny << ' ' << format_double(field.spacing) << ' '
      << format_double(field.origin.x) << ' ' << format_double(field.origin.y) << ' '
      << (field.domain == DomainShape::disc ? "disc" : "rect") << ' '
      << (field.bc == BcKind::dirichlet ? "dirichlet" : "neumann") << '\n';
  for (int j = 0; j < field.ny; ++j)
    for (int i = 0; i < field.nx; ++i) {
      const Vec2& v = field.at(i, j);
      out << format_double(v.x) << ' ' << format_double(v.y) << '\n';
    }
}

Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open field file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::size_t offset = 0;
  auto next_line = [&](const char* what) {
    if (offset >= content.size())
      throw ParseError(std::string("field file truncated while reading ") + what, offset);
    std::size_t end = content.find('\n', offset);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(offset, end - offset);
    offset = end + 1;
    return line;
  };

  std::string magic = next_line("magic");
  if (magic != "TWAC1") {
    if (magic.rfind("TWAC", 0) == 0)
      throw VersionError("unsupported field file version: " + magic);
    throw ParseError("bad magic, expected TWAC1", 0);
  }

  std::size_t header_off = offset;
  std::istringstream header(next_line("header"));
  GridSpec spec;
  std::string domain, bc;
  if (!(header >> spec.nx >> spec.ny >> spec.spacing >> spec.origin.x >> spec.origin.y >> domain >>
        bc))
    throw ParseError("malformed field header", header_off);
  if (spec.nx < 4 || spec.ny < 4 || spec.spacing <= 0.0)
    throw ParseError("invalid field dimensions", header_off);
  if (domain == "disc")
    spec.domain = DomainShape::disc;
  else if (domain == "rect")
    spec.domain = DomainShape::rectangle;
  else
    throw ParseError("unknown domain tag: " + domain, header_off);

  Field f = make_field(spec, bc == "dirichlet" ? BcKind::dirichlet : BcKind::neumann);
  if (bc != "dirichlet" && bc != "neumann")
    throw ParseError("unknown bc tag: " + bc, header_off);

  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      std::size_t line_off = offset;
      std::istringstream ls(next_line("node values"));
      Vec2 v;
      if (!(ls >> v.x >> v.y))
        throw ParseError("malformed node value line", line_off);
      f.at(i, j) = v;
    }
  return f;
}

void write_label_pgm(const Field& field, const Potential& pot, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write pgm: " + path);
  out << "P5\n" << field.nx << ' ' << field.ny << "\n255\n";
  std::string row(field.nx, '\0');
  for (int j = field.ny - 1; j >= 0; --j) {  // top row first
    for (int i = 0; i < field.nx; ++i) {
      unsigned char g = 0;
      if (field.kind(i, j) != NodeKind::outside) {
        const Vec2& v = field.at(i, j);
        int best = 0;
        for (int l = 1; l < 3; ++l)
          if (dist(v, pot.wells[l]) < dist(v, pot.wells[best])) best = l;
        g = static_cast<unsigned char>(85 * (best + 1));
      }
      row[i] = static_cast<char>(g);
    }
    out.write(row.data(), row.size());
  }
}

}  // namespace twac
