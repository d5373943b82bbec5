#pragma once

#include <string>
#include <vector>

#include "twac/junction.hpp"
#include "twac/vec.hpp"

namespace twac {

/// One labeled arc of the unit circle, counterclockwise from `start` to `end`
/// (angles in radians; end may exceed 2 pi when the arc wraps).
struct BoundaryArc {
  double start = 0.0;
  double end = 0.0;
  int label = 0;  // well index, 0-based
};

/// BV trace on the unit circle: k labeled arcs with discontinuity angles.
struct BoundaryData {
  std::vector<BoundaryArc> arcs;
  int max_k = 8;

  int k() const { return arcs.size() > 1 ? static_cast<int>(arcs.size()) : 0; }
  int label_at(double angle) const;
  /// Discontinuity positions on the circle with the labels on both sides
  /// (ccw order: label_before -> label_after across the angle).
  struct Jump {
    double angle;
    Vec2 point;
    int label_before;
    int label_after;
  };
  std::vector<Jump> jumps() const;

  /// Checks coverage, adjacency and k <= max_k. Throws ValidationError.
  void validate() const;

  BoundaryData rotated(double angle) const;

  /// Three arcs with discontinuities at the given angles (degrees helpers are
  /// in the tests); arcs labeled 0,1,2 counterclockwise starting at a0.
  static BoundaryData three_arcs(double a0, double a1, double a2);
  static BoundaryData two_arcs(double a0, double a1, int label_first = 0, int label_second = 1);
  static BoundaryData single(int label);
};

struct NetworkSegment {
  Vec2 a, b;
  int label_left = 0;   // phase labels of the two sides (unordered pair)
  int label_right = 1;
  double length() const { return dist(a, b); }
};

/// Circular arc bounding one colored phase against the gray region.
struct GrayArc {
  Vec2 center;
  double radius = 0.0;
  double angle_start = 0.0;  // ccw sweep from angle_start by `sweep`
  double sweep = 0.0;
  int label = 0;
  double length() const { return radius * sweep; }
  Vec2 point_at(double s) const;  // s in [0,1]
};

struct NetworkFace {
  int label = 0;
  std::vector<Vec2> polygon;  // ccw, boundary arcs sampled
};

/// Sharp minimal partition of the unit disc (Problem 1 solution).
struct PartitionNetwork {
  std::vector<Vec2> junctions;
  std::vector<NetworkSegment> segments;
  std::vector<NetworkFace> faces;
  double cost = 0.0;

  /// Phase label at an interior point (face polygon query with a
  /// nearest-face fallback at interfaces).
  int label_at(Vec2 x) const;

  Config to_config() const;
  /// "M x y L x y" / arc path lines for plotting.
  std::string to_path_list() const;
};

/// Wetted almost-partition of the disc (Problem 2 solution).
struct WettedNetwork {
  std::vector<Vec2> junctions;        // original junction positions
  std::vector<NetworkSegment> segments;  // trimmed at cusp points
  std::vector<GrayArc> arcs;
  std::vector<Vec2> cusps;
  std::vector<NetworkFace> faces;
  std::array<double, 3> curvature{};  // kappa_l, 0 where phase absent
  double gray_area = 0.0;
  double cost = 0.0;
  double delta = 0.0;

  Config to_config() const;
  std::string to_path_list() const;
};

/// Sum_l t_l * H^1(boundary of phase l inside the disc): segments count
/// t_i + t_j = c_ij, colored gray-boundary arcs count t_l once.
/// Throws ValidationError on inconsistent segment labels.
double perimeter_energy(const PartitionNetwork& network, const SurfaceTensions& tensions);
double perimeter_energy(const WettedNetwork& network, const SurfaceTensions& tensions);

/// Minimal sharp partition for the given trace. Enumerated topologies cover
/// k <= 4 (chords, junction stars, and the two-junction tree for four arcs
/// with three labels). Throws UnsupportedTopologyError beyond that.
PartitionNetwork solve_problem1(const BoundaryData& bdata, const SurfaceTensions& tensions);

/// Max deviation of interior junction sector angles from the sine-law angles
/// implied by the tensions (radians). Zero junctions -> 0.
double junction_angle_residual(const PartitionNetwork& network, const SurfaceTensions& tensions);

/// Independent pixel-labeling estimate of m0: iterated label sweeps over an
/// n x n grid with Cauchy-Crofton boundary weights, best over a family of
/// seeded wedge initializations. Upper-bound estimate with ~1% metrication
/// bias.
double multiway_cut_oracle(const BoundaryData& bdata, const SurfaceTensions& tensions, int n,
                           unsigned long long seed = 1);

/// Minimal wetted almost-partition with gray area exactly delta (distributed
/// across junctions to equalize marginal cost). Throws DeltaTooLargeError
/// when the arcs would leave the feasible range.
WettedNetwork solve_problem2(const BoundaryData& bdata, const SurfaceTensions& tensions,
                             double delta);

struct ComparisonRow {
  double delta = 0.0;
  double m0 = 0.0;
  double m0_delta = 0.0;
  double gap = 0.0;
  double gap_over_sqrt_delta = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  double fitted_exponent = 0.0;  // least-squares slope of log(gap) vs log(delta)
  double gamma_estimate = 0.0;   // max gap / sqrt(delta)
  bool monotone = false;         // m0^delta <= m0 and nonincreasing in delta
  std::string to_csv() const;
};

/// Sweep of solve_problem2 over the deltas with the delta^{1/2} gap fit.
ComparisonTable compare_partitions(const BoundaryData& bdata, const SurfaceTensions& tensions,
                                   std::vector<double> deltas);

}  // namespace twac
