#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <array>
#include <vector>

#include "twac/potential.hpp"
#include "twac/vec.hpp"

namespace twac::oracles {

/// Brute-force geodesic cost between wells i and j: Dijkstra on a uniform
/// u-plane grid covering the well hull padded by 1.5x its diameter,
/// 16-neighborhood (axis + diagonal + knight moves), edge weights
/// sqrt(2 W(midpoint)) * edge length. Upper-bound estimate with ~1%
/// metrication bias.
double dijkstra_cost(const Potential& pot, int i, int j, int n = 400);

/// sqrt(2) * int_a^b sqrt(W) along the straight segment (composite Simpson).
double segment_cost(const Potential& pot, Vec2 a, Vec2 b, int intervals = 4096);

/// Central finite differences of W.
Vec2 fd_grad(const Potential& pot, Vec2 u, double step = 1e-5);
Mat2 fd_hess(const Potential& pot, Vec2 u, double step = 1e-4);

/// Weighted Fermat point by Weiszfeld iteration: minimizes
/// sum_m w_m |x - q_m|. Returns the minimal value.
double weiszfeld_cost(const std::vector<Vec2>& anchors, const std::vector<double>& weights,
                      int iters = 20000);

/// Independent solve of the sine system
///   sin(a1)/c23 = sin(a2)/c13 = sin(a3)/c12,  a1+a2+a3 = 2 pi
/// by shrinking-grid scan over (a1, a2). No triangle construction, no Newton.
std::array<double, 3> sine_system_scan(double c12, double c13, double c23);

/// Crossing-number winding parity/count for a closed polyline (independent of
/// the angle-sum route in the library).
int crossing_winding(const std::vector<Vec2>& closed_polyline, Vec2 p);

/// 1D energy of a sampled profile int W + |z'|^2/2 dt (trapezoid).
double profile_energy(const Potential& pot, const std::vector<double>& t,
                      const std::vector<Vec2>& z);

}  // namespace twac::oracles
