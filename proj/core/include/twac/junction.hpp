#pragma once

#include <array>

#include "twac/config.hpp"
#include "twac/vec.hpp"

namespace twac {

/// Per-phase boundary weights t_l with t_i + t_j = c_ij.
struct SurfaceTensions {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double c12 = 0.0, c13 = 0.0, c23 = 0.0;

  double tension(int l) const;          // 0-based phase index
  double cost(int i, int j) const;      // 0-based pair
  static SurfaceTensions from_tensions(double t1, double t2, double t3);
};

/// Exact linear solve for the tensions. Throws DegenerateTensionError when
/// any tension is nonpositive (triangle inequality failure).
SurfaceTensions surface_tensions(double c12, double c13, double c23);

/// Opening angles (alpha1, alpha2, alpha3) of the minimal triple junction:
/// sin(alpha_1)/c23 = sin(alpha_2)/c13 = sin(alpha_3)/c12, sum = 2 pi.
/// Solved by the closed-form triangle construction with a Newton polish.
/// Throws DegenerateTensionError on triangle violation.
std::array<double, 3> junction_angles(double c12, double c13, double c23);

/// Piecewise-constant map on three sectors emanating from a center point.
struct JunctionMap {
  Vec2 center{};
  std::array<double, 3> ray_angles{};     // sector start angles, increasing ccw
  std::array<double, 3> opening_angles{}; // alpha of the sector starting at ray_angles[k]
  std::array<int, 3> labels{};            // well index (0-based) per sector

  /// Well label at a point; points on a ray belong to the sector starting
  /// there (counterclockwise-adjacent convention).
  int label_at(Vec2 x) const;

  Config to_config() const;
  static JunctionMap from_config(const Config& cfg, const std::string& section = "junction_map");
};

/// Builds the sector map: sector k (in assignment order) spans
/// [rotation + sum of previous angles, ...) and carries well assignment[k].
JunctionMap make_junction_map(const std::array<double, 3>& angles, double rotation,
                              const std::array<int, 3>& assignment, Vec2 center = {0.0, 0.0});

}  // namespace twac
