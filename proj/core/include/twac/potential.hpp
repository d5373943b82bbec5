#pragma once

#include <array>
#include <string>

#include "twac/config.hpp"
#include "twac/vec.hpp"

namespace twac {

enum class PotentialFamily { product, perturbed };

/// Triple-well potential W : R^2 -> [0, inf) vanishing exactly at three wells.
///
/// The product family is W(u) = scale * prod_l a_l |u - p_l|^2; the perturbed
/// family multiplies it by 1 + eps * exp(-|u - z|^2 / w^2) to kill all
/// symmetry. Both have analytic gradients and Hessians.
class Potential {
 public:
  PotentialFamily family = PotentialFamily::product;
  std::array<Vec2, 3> wells{};
  double scale = 1.0;
  std::array<double, 3> coeffs{1.0, 1.0, 1.0};
  // perturbed-family parameters
  double eps = 0.0;
  Vec2 bump_center{};
  double bump_width = 1.0;

  // estimated hypothesis constants, filled by make_* / validate
  double convexity_radius = 0.0;  // beta: W convex on balls of this radius about wells
  double hessian_floor = 0.0;     // b: min Hessian eigenvalue over the wells

  double eval(Vec2 u) const;
  Vec2 grad(Vec2 u) const;
  Mat2 hess(Vec2 u) const;

  /// sqrt(2 W(u)), the degenerate metric weight.
  double metric_weight(Vec2 u) const { return std::sqrt(2.0 * eval(u)); }

  double min_well_separation() const;
  double well_diameter() const;

  /// Max spectral norm of the Hessian sampled over the padded well hull;
  /// used as a Lipschitz estimate for grad W in step-size heuristics.
  double grad_lipschitz() const;

  Config to_config() const;
  static Potential from_config(const Config& cfg, const std::string& section = "potential");
};

/// Default analytic family W(u) = scale * prod_l |u - p_l|^2.
/// Throws ValidationError on coincident wells.
Potential make_product_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale = 1.0);

/// Product well with per-factor coefficients a_l (asymmetric variant).
Potential make_product_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale,
                            const std::array<double, 3>& coeffs);

/// Product well times (1 + eps * exp(-|u-z|^2/w^2)); breaks all symmetry while
/// keeping wells, gradients and Hessian floors intact (eps > -1 required).
Potential make_perturbed_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale, double eps,
                              Vec2 bump_center, double bump_width);

/// The symmetric reference well: unit-scale product well with wells on the
/// unit circle at angles 0, 120, 240 degrees.
Potential symmetric_well();

struct ValidationReport {
  bool wells_are_zeros = false;        // W = 0, grad = 0 at each well
  bool hessian_positive = false;       // floor above threshold
  bool positive_away_from_wells = false;
  bool radially_monotone = false;      // p . grad W >= 0 for |p| >= M
  double hessian_floor = 0.0;
  double convexity_radius = 0.0;
  double radial_bound_M = 0.0;
  // filled by the geodesics module (costs are not a potential-local quantity)
  enum class Triangle { unchecked, strict, marginal, violated };
  Triangle triangle = Triangle::unchecked;
  double triangle_margin = 0.0;  // min over the three strict inequalities of (sum - side)/sum

  bool all_passed() const {
    return wells_are_zeros && hessian_positive && positive_away_from_wells && radially_monotone;
  }
  std::string summary() const;
};

/// Sampled verification of the potential hypotheses. Failed checks are flagged
/// in the report, never thrown.
ValidationReport validate(const Potential& pot);

}  // namespace twac
