#pragma once

#include <vector>

#include "twac/field.hpp"
#include "twac/geodesics.hpp"
#include "twac/partitions.hpp"
#include "twac/potential.hpp"

namespace twac {

/// Midpoint-rule discretization of int_Omega R W(u) + |grad u|^2 / (2R) dx
/// over cells whose four corners lie inside the domain.
double energy(const Field& field, const Potential& pot, double R);

/// Same restricted to cells whose centers lie in the ball of radius r about
/// the domain center.
double energy_in_ball(const Field& field, const Potential& pot, double R, double r);

struct RelaxOptions {
  double tol = 1e-4;          // sup-norm of the residual Lap u / R^2 - grad W(u)
  long max_iter = 40000;      // sweeps
  int energy_check_every = 16;
  double step_safety = 1.0;   // multiplies the stability step
  int threads = 0;            // 0 = runtime default
};

struct RelaxInfo {
  long iterations = 0;
  double residual = 0.0;
  double final_energy = 0.0;
  double step = 0.0;
};

/// Damped fixed-point relaxation of (1/R^2) Lap u = grad W(u): explicit
/// reaction, step from the stability heuristic h^2 R^2 / (4 + h^2 R^2 L).
/// Energy is checked periodically; on an increase the state reverts and the
/// step halves. Neumann handled by ghost reflection at the staircase ring,
/// Dirichlet by a clamped ring. Throws ConvergenceError past max_iter.
Field relax(const Field& field, const Potential& pot, double R, const RelaxOptions& opts = {},
            RelaxInfo* info = nullptr);

/// Bilinear resample of u(R x) onto the target grid. Throws
/// OutOfFootprintError when the rescaled target leaves the source box.
Field blowdown(const Field& field, double R_factor, const GridSpec& target);

/// Boundary trace on a circle: well-valued on arc interiors, heteroclinic
/// transitions of width O(1/R) across each discontinuity.
struct TraceData {
  double R = 1.0;
  double radius = 1.0;           // circle radius in domain coordinates
  std::vector<double> theta;     // uniform on [0, 2 pi)
  std::vector<Vec2> value;

  Vec2 at(double angle) const;   // periodic linear interpolation
  /// 1D boundary energy int R W + |d_s h|^2 / (2R) ds.
  double boundary_energy(const Potential& pot) const;
};

/// Builds the compressed-heteroclinic trace for the given boundary data.
/// Throws ArcTooShortError when an arc cannot hold its two transitions.
TraceData build_trace(const BoundaryData& bdata, const Potential& pot, double R,
                      double radius = 1.0, int resolution = 4096);

/// Writes the trace onto the boundary ring of a disc field and marks it
/// Dirichlet.
void apply_trace(Field& field, const TraceData& trace);

/// Recovery-competitor schedule (powers of R from the upper-bound
/// construction). validate() enforces 2h <= eta and h < eta lambda^2.
struct RecoverySchedule {
  double eta = 0.0;
  double lambda = 0.0;
  double rho = 0.0;
  double h = 0.0;

  static RecoverySchedule defaults(double R);
  void validate() const;
};

/// Sharp-interface recovery field on the unit disc: exact wells deep in the
/// chambers of u0, compressed heteroclinic profiles (split at the metric
/// midpoint) across interface strips, and a radial boundary layer on the
/// annulus of width rho matching the trace.
Field recovery_field(const PartitionNetwork& u0, const TraceData& trace, const Potential& pot,
                     double R, const RecoverySchedule& sched, int grid_n);

/// Local-minimality probe: perturb inside K, re-relax with the ring of K
/// clamped, and report energy deltas on K (nonnegative up to solver
/// tolerance for a genuine local minimizer).
struct ProbeReport {
  std::vector<double> deltas;
  double min_delta = 0.0;
  double area = 0.0;             // |K| for the tolerance scale
  double base_energy = 0.0;
};

struct Rect {
  Vec2 lo, hi;
};

ProbeReport local_min_probe(const Field& field, const Potential& pot, double R, const Rect& K,
                            int trials = 8, double amplitude = 0.1,
                            unsigned long long seed = 1, const RelaxOptions& opts = {});

}  // namespace twac
