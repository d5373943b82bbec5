#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twac/field.hpp"
#include "twac/geodesics.hpp"
#include "twac/junction.hpp"
#include "twac/potential.hpp"

namespace twac {

// All diagnostics interpret the field as an entire-solution window at unit
// scale (the E_1 energy): rescale solver outputs with Field::rescaled(R)
// before probing radii in blowup coordinates.

/// Per-node stress tensor T_ij = u_xi . u_xj - delta_ij (|grad u|^2/2 + W(u))
/// with its discrete divergence norms.
struct StressField {
  int nx = 0, ny = 0;
  std::vector<Mat2> tensor;
  double max_divergence = 0.0;   // over interior nodes two cells from the rim
  double l2_divergence = 0.0;
};
StressField stress_tensor(const Field& field, const Potential& pot);

/// Discrete residual of the Pohozaev identity on the centered ball of
/// radius r: (1/2) oint (|U_nu|^2/2 - |U_s|^2/2 - W) + (1/r) int_{B_r} W.
/// Vanishes for exact solutions. Throws ValidationError when the circle
/// exits the domain.
double pohozaev_residual(const Field& field, const Potential& pot, double r, int samples = 4096);

struct WtildeProfile {
  std::vector<double> radii;
  std::vector<double> values;        // (1/R) int_{B_R} W
  double l0_estimate = 0.0;          // average over the last octave
  double alpha_fit = 0.0;            // from the equipartition defect exponent
  double c3_fit = 0.0;               // drop allowance coefficient
  double monotonicity_defect = 0.0;  // max (drop - 1.25 c3 R1^{-alpha/2})_+
  double tail_variation = 0.0;       // (max-min)/max over the last octave
};
WtildeProfile wtilde_profile(const Field& field, const Potential& pot,
                             const std::vector<double>& radii);

struct DefectProfile {
  std::vector<double> radii;
  std::vector<double> values;       // int_{B_R} (sqrt W - |grad U|/sqrt 2)^2
  double fitted_exponent = 0.0;     // log-log least squares
  double exponent_upper95 = 0.0;    // one-sided 95% confidence bound on the slope
};
DefectProfile equipartition_defect(const Field& field, const Potential& pot,
                                   const std::vector<double>& radii);

/// int over the annulus r1 < |x| < r2 of |U_nu|^2 / |x|.
/// Throws ValidationError on a degenerate annulus.
double radial_energy(const Field& field, double r1, double r2);

enum class BlowdownClass { constant, half_plane, triple_junction, inconclusive };

struct HalfPlaneFit {
  double line_angle = 0.0;  // boundary direction
  double offset = 0.0;      // signed offset of the line from the center
  int label_pos = 0;        // label on the +normal side
  int label_neg = 1;
};

struct ClassifyThresholds {
  double margin = 0.2;             // runner-up must be worse by this factor
  double junction_max_distance = 1e300;  // per-area cap for a junction verdict
  int rotation_steps = 720;
  int halfplane_angle_steps = 180;
  int halfplane_offset_steps = 9;
  double halfplane_offset_span = 0.2;  // fraction of the domain radius
};

struct BlowdownReport {
  std::vector<double> radii;
  std::vector<double> wtilde;
  std::vector<double> defect;
  std::vector<double> radial_term;   // annulus [R/2, R] per radius
  double l0_estimate = 0.0;
  double defect_exponent = 0.0;
  double wtilde_tail_variation = 0.0;
  double monotonicity_defect = 0.0;

  BlowdownClass classification = BlowdownClass::inconclusive;
  double best_distance = 0.0;        // L^1 over the inscribed square
  double best_distance_per_area = 0.0;
  double constant_distance = 0.0;
  double halfplane_distance = 0.0;
  double junction_distance = 0.0;
  std::optional<JunctionMap> junction_fit;
  std::optional<HalfPlaneFit> halfplane_fit;
  int constant_label = 0;

  std::string classification_name() const;
  std::string to_csv() const;        // one row per radius
  Config summary() const;            // thresholds recorded alongside results
};

/// Fits constant / half-plane / sine-law junction maps by L1 distance over
/// the inscribed square and classifies by best fit with a margin.
BlowdownReport classify_blowdown(const Field& field, const Potential& pot,
                                 const PairwiseCosts& costs, const std::vector<double>& radii,
                                 const ClassifyThresholds& thresholds = {});

/// min over rotations and assignments of || field - u* ||_{L1(K)}, K the
/// inscribed square. Returns the distance and the best junction map.
std::pair<double, JunctionMap> distance_to_A(const Field& field, const Potential& pot,
                                             const PairwiseCosts& costs, int rotation_steps = 720);

/// Restriction of the field to the circle of radius rho as a 1D profile.
struct TransitionWindow {
  double theta_peak = 0.0;   // W-max angle inside the window
  double theta_lo = 0.0, theta_hi = 0.0;
  int label_before = -1, label_after = -1;
  double energy = 0.0;       // 1D energy over the padded window
  double sup_dist = 0.0;     // vs the matching heteroclinic, aligned at the peak
  double h1_dist = 0.0;
};

struct CircleProfile {
  double rho = 0.0;
  std::vector<double> theta;
  std::vector<Vec2> value;
  double full_energy = 0.0;          // oint W + |U_s|^2/2 ds
  double w0 = 0.0;                   // transition level
  std::vector<double> hit_angles;    // W(U) crossings of w0
  std::vector<TransitionWindow> windows;
};

/// Throws ValidationError when the circle exits the domain.
CircleProfile circle_profile(const Field& field, const Potential& pot, double rho,
                             int samples = 4096);

/// The closed polyline traced by the field along the circle (for winding
/// number checks against the curve Lambda).
std::vector<Vec2> circle_image(const CircleProfile& profile);

}  // namespace twac
