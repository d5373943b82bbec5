#pragma once

#include <functional>
#include <string>
#include <vector>

#include "twac/junction.hpp"
#include "twac/partitions.hpp"
#include "twac/potential.hpp"
#include "twac/vec.hpp"

namespace twac {

enum class NodeKind : unsigned char { outside = 0, interior = 1, boundary = 2 };
enum class BcKind { neumann, dirichlet };
enum class DomainShape { rectangle, disc };

struct GridSpec {
  int nx = 0, ny = 0;
  double spacing = 1.0;
  Vec2 origin{};
  DomainShape domain = DomainShape::rectangle;

  /// Square grid over [-extent, extent]^2; for a disc domain the disc is
  /// inscribed in that square.
  static GridSpec square(int n, double extent, DomainShape domain);
};

/// R^2-valued samples on a uniform grid over a disc or rectangle.
///
/// Disc convention (also used by the file format): the disc is inscribed in
/// the grid bounding box -- center at the box center, radius
/// min(nx-1, ny-1) * spacing / 2.
struct Field {
  int nx = 0, ny = 0;
  double spacing = 1.0;
  Vec2 origin{};
  DomainShape domain = DomainShape::rectangle;
  BcKind bc = BcKind::neumann;
  std::vector<Vec2> values;       // row-major, index j*nx + i
  std::vector<NodeKind> mask;

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Vec2& at(int i, int j) { return values[idx(i, j)]; }
  const Vec2& at(int i, int j) const { return values[idx(i, j)]; }
  NodeKind kind(int i, int j) const { return mask[idx(i, j)]; }
  Vec2 pos(int i, int j) const { return {origin.x + i * spacing, origin.y + j * spacing}; }

  Vec2 center() const;
  double disc_radius() const;
  bool inside(int i, int j) const { return kind(i, j) != NodeKind::outside; }

  /// Bilinear sample at an arbitrary point (clamped to the grid box).
  Vec2 sample(Vec2 x) const;
  /// Bilinear sample of the gradient from central differences.
  void sample_gradient(Vec2 x, Vec2& du_dx, Vec2& du_dy) const;

  /// Same samples, coordinates scaled by `factor` (spacing and origin only).
  /// Reinterprets a unit-disc solve as a field on the disc of radius factor.
  Field rescaled(double factor) const;

  GridSpec spec() const { return {nx, ny, spacing, origin, domain}; }
};

/// Grid with the mask set up for the domain shape; values all zero.
Field make_field(const GridSpec& spec, BcKind bc = BcKind::neumann);

/// Piecewise-constant well-valued samples of a junction map / partition
/// network / arbitrary label function (label -> wells[label]).
Field sample_map(const JunctionMap& map, const Potential& pot, const GridSpec& spec);
Field sample_map(const PartitionNetwork& network, const Potential& pot, const GridSpec& spec);
Field sample_map(const std::function<int(Vec2)>& label_of, const Potential& pot,
                 const GridSpec& spec);
/// Constant field at a well.
Field sample_constant(Vec2 well, const GridSpec& spec);

/// Lossless text format, magic "TWAC1". Throws ParseError (with byte offset)
/// on malformed input and VersionError on an unknown magic.
void write_field(const Field& field, const std::string& path);
Field read_field(const std::string& path);

/// Binary P5 snapshot of the nearest-well label map (one gray level per well,
/// black outside the domain).
void write_label_pgm(const Field& field, const Potential& pot, const std::string& path);

}  // namespace twac
