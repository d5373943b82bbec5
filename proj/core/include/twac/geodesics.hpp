#pragma once

#include <string>
#include <vector>

#include "twac/potential.hpp"
#include "twac/vec.hpp"

namespace twac {

/// Discrete path in the u-plane with its length under the degenerate
/// metric sqrt(2 W) |du|.
struct PathSample {
  std::vector<Vec2> points;
  double length = 0.0;
};

struct MetricOptions {
  int max_sweeps = 400000;
  double tol = 1e-12;        // relative length change per convergence window
  int window = 50;           // sweeps per reparametrization / convergence check
  double initial_step = 0.0; // 0 = auto from path scale
};

/// Locally length-minimizing discrete path from p to q (string-style
/// relaxation: gradient descent with backtracking + equal-arclength
/// reparametrization). The returned length is an upper bound on d(p,q).
/// Throws ConvergenceError (with the last iterate attached to the message)
/// when the relaxation stalls above tolerance.
PathSample metric_distance(const Potential& pot, Vec2 p, Vec2 q, int n = 192,
                           const MetricOptions& opts = {});

/// Weighted length of a fixed polyline under sqrt(2 W) with midpoint weights.
double path_length(const Potential& pot, const std::vector<Vec2>& points);

struct PairwiseCosts {
  double c12 = 0.0, c13 = 0.0, c23 = 0.0;
  bool strict_triangle = false;
  double margin = 0.0;  // min over inequalities of (sum - side)/sum; <=0 means violated
  double cost(int i, int j) const;
};

/// Geodesic costs between all well pairs plus the triangle-inequality status.
/// The margin below `marginal_tol` (default 1%) is reported as marginal.
PairwiseCosts pairwise_costs(const Potential& pot, int n = 192);

/// Copies triangle status into a potential validation report.
void fill_triangle_status(ValidationReport& rep, const PairwiseCosts& costs,
                          double marginal_tol = 0.01);

/// Sampled 1D heteroclinic connection between wells i and j on [-T, T].
struct HeteroclinicProfile {
  int i = 0, j = 1;                 // well indices, 0-based
  std::vector<double> t;            // sample times, uniform
  std::vector<Vec2> value;          // zeta(t)
  double energy = 0.0;              // int W + |zeta'|^2/2 dt
  double decay_rate = 0.0;          // fitted tail rate, filled by decay_rate()
  double max_first_integral_dev = 0.0;  // max |0.5 |zeta'|^2 - W|
  double ode_residual = 0.0;        // max |zeta'' - grad W| over the interior

  Vec2 at(double time) const;       // linear interpolation, clamped to the ends
};

struct HeteroOptions {
  double tau = 2e-3;        // semi-implicit pseudo-time step
  int max_iters = 200000;
  double energy_tol = 1e-13;
  bool pin_translate = true; // place the W-max of the profile at t = 0
  std::vector<double>* energy_history = nullptr;  // filled at every check
};

/// Minimizer of the clamped 1D action between wells i and j.
/// Throws TruncationError when the converged ends sit outside the convexity
/// radius of their wells; ConvergenceError when relaxation stalls.
HeteroclinicProfile heteroclinic(const Potential& pot, int i, int j, double T = 12.0,
                                 int n = 2048, const HeteroOptions& opts = {});

/// Least-squares exponential rate of the tail approach to the terminal well.
/// Throws InsufficientTailError when fewer than 10 usable tail samples exist.
double decay_rate(const Potential& pot, const HeteroclinicProfile& profile);

/// Export t, u1, u2, W, half_speed_sq as CSV.
void write_profile_csv(const Potential& pot, const HeteroclinicProfile& profile,
                       const std::string& path);

/// Closed curve through the three wells formed by the heteroclinic images.
struct LambdaCurve {
  std::vector<Vec2> points;  // closed: first point repeated at the end
  bool is_simple = false;
};

/// Concatenates the three profiles into the closed curve Lambda and checks
/// simplicity with a segment-intersection sweep.
LambdaCurve lambda_curve(const Potential& pot, double T = 12.0, int n = 1024);
LambdaCurve lambda_curve(const HeteroclinicProfile& z12, const HeteroclinicProfile& z23,
                         const HeteroclinicProfile& z13);

/// Winding number of a closed polyline about a point.
/// Throws OnCurveError when the point lies on the curve.
int winding_number(const std::vector<Vec2>& closed_polyline, Vec2 point);

/// Heuristic geodesic-uniqueness probe: relax `trials` perturbed initial
/// paths and report the max pairwise Hausdorff distance of the results.
/// Distances above `tol` suggest non-uniqueness (flag, not an error).
struct UniquenessReport {
  bool unique = true;
  double max_hausdorff = 0.0;
};
UniquenessReport geodesic_uniqueness_probe(const Potential& pot, int i, int j,
                                           int trials = 16, double tol = 1e-3,
                                           unsigned long long seed = 1);

}  // namespace twac
