#include "twac/potential.hpp"

#include <cmath>
#include <sstream>

#include "twac/errors.hpp"

namespace twac {

namespace {

struct Bump {
  double value;  // 1 + eps * g
  Vec2 grad;
  Mat2 hess;
};

// g(u) = exp(-|u-z|^2/w^2)
Bump eval_bump(const Potential& pot, Vec2 u) {
  if (pot.family != PotentialFamily::perturbed || pot.eps == 0.0)
    return {1.0, {0.0, 0.0}, {0.0, 0.0, 0.0}};
  Vec2 d = u - pot.bump_center;
  double w2 = pot.bump_width * pot.bump_width;
  double g = std::exp(-norm_sq(d) / w2);
  Vec2 gg = d * (-2.0 * g / w2);
  // Hessian of g: (4/w^4) g d d^T - (2/w^2) g I
  Mat2 gh = {4.0 / (w2 * w2) * g * d.x * d.x - 2.0 / w2 * g,
             4.0 / (w2 * w2) * g * d.x * d.y,
             4.0 / (w2 * w2) * g * d.y * d.y - 2.0 / w2 * g};
  return {1.0 + pot.eps * g, gg * pot.eps, gh * pot.eps};
}

}  // namespace

double Potential::eval(Vec2 u) const {
  double f = scale;
  for (int l = 0; l < 3; ++l) f *= coeffs[l] * norm_sq(u - wells[l]);
  return f * eval_bump(*this, u).value;
}

Vec2 Potential::grad(Vec2 u) const {
  // product rule over the three quadratic factors
  double f[3];
  Vec2 df[3];
  for (int l = 0; l < 3; ++l) {
    Vec2 d = u - wells[l];
    f[l] = coeffs[l] * norm_sq(d);
    df[l] = d * (2.0 * coeffs[l]);
  }
  Vec2 gp{0.0, 0.0};
  for (int l = 0; l < 3; ++l) {
    double rest = scale;
    for (int m = 0; m < 3; ++m)
      if (m != l) rest *= f[m];
    gp += df[l] * rest;
  }
  Bump b = eval_bump(*this, u);
  if (family == PotentialFamily::product) return gp;
  double prod = scale * f[0] * f[1] * f[2];
  return gp * b.value + b.grad * prod;
}

Mat2 Potential::hess(Vec2 u) const {
  double f[3];
  Vec2 df[3];
  for (int l = 0; l < 3; ++l) {
    Vec2 d = u - wells[l];
    f[l] = coeffs[l] * norm_sq(d);
    df[l] = d * (2.0 * coeffs[l]);
  }
  Mat2 hp{0.0, 0.0, 0.0};
  Vec2 gp{0.0, 0.0};
  for (int l = 0; l < 3; ++l) {
    double rest = scale;
    for (int m = 0; m < 3; ++m)
      if (m != l) rest *= f[m];
    hp += identity2(2.0 * coeffs[l] * rest);
    gp += df[l] * rest;
    for (int m = l + 1; m < 3; ++m) {
      double rest2 = scale;
      for (int k = 0; k < 3; ++k)
        if (k != l && k != m) rest2 *= f[k];
      hp += sym_outer(df[l], df[m]) * rest2;
    }
  }
  if (family == PotentialFamily::product) return hp;
  Bump b = eval_bump(*this, u);
  double prod = scale * f[0] * f[1] * f[2];
  Mat2 h = hp * b.value;
  h += sym_outer(gp, b.grad);
  h += b.hess * prod;
  return h;
}

double Potential::min_well_separation() const {
  double m = dist(wells[0], wells[1]);
  m = std::min(m, dist(wells[0], wells[2]));
  m = std::min(m, dist(wells[1], wells[2]));
  return m;
}

double Potential::well_diameter() const {
  double m = dist(wells[0], wells[1]);
  m = std::max(m, dist(wells[0], wells[2]));
  m = std::max(m, dist(wells[1], wells[2]));
  return m;
}

double Potential::grad_lipschitz() const {
  // sample over the disc the dynamics actually visits: well-valued boundary
  // data keeps relaxed fields inside the well hull (maximum principle), so a
  // modest margin suffices and the degree-6 growth far out stays irrelevant
  Vec2 center = (wells[0] + wells[1] + wells[2]) / 3.0;
  double radius = 0.0;
  for (const Vec2& p : wells) radius = std::max(radius, dist(p, center));
  radius *= 1.15;
  double lip = 0.0;
  const int nr = 24, na = 64;
  for (int r = 0; r <= nr; ++r)
    for (int a = 0; a < na; ++a) {
      double ang = 2.0 * pi() * a / na;
      Vec2 u = center + Vec2{std::cos(ang), std::sin(ang)} * (radius * r / nr);
      lip = std::max(lip, hess(u).spectral_norm());
    }
  return lip;
}

namespace {

void check_wells(Vec2 p1, Vec2 p2, Vec2 p3) {
  const double tol = 1e-12;
  if (dist(p1, p2) < tol || dist(p1, p3) < tol || dist(p2, p3) < tol)
    throw ValidationError("invalid wells: wells must be pairwise distinct");
}

// Conservative convexity radius: bisection on sampled Hessian PSD-ness along
// rays from each well; the reported radius is the minimum over 32 directions
// and all wells.
double estimate_convexity_radius(const Potential& pot) {
  double radius = 0.45 * pot.min_well_separation();
  double best = radius;
  for (int l = 0; l < 3; ++l) {
    for (int k = 0; k < 32; ++k) {
      double ang = 2.0 * pi() * k / 32.0;
      Vec2 dir{std::cos(ang), std::sin(ang)};
      double lo = 0.0, hi = radius;
      // find the first non-PSD sample along the ray, then bisect
      bool hit = false;
      const int samples = 48;
      for (int s = 1; s <= samples; ++s) {
        double r = radius * s / samples;
        if (pot.hess(pot.wells[l] + dir * r).min_eigenvalue() < 0.0) {
          hi = r;
          lo = radius * (s - 1) / samples;
          hit = true;
          break;
        }
      }
      if (!hit) continue;
      for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (pot.hess(pot.wells[l] + dir * mid).min_eigenvalue() < 0.0)
          hi = mid;
        else
          lo = mid;
      }
      best = std::min(best, lo);
    }
  }
  return best;
}

double estimate_hessian_floor(const Potential& pot) {
  double floor = pot.hess(pot.wells[0]).min_eigenvalue();
  for (int l = 1; l < 3; ++l)
    floor = std::min(floor, pot.hess(pot.wells[l]).min_eigenvalue());
  return floor;
}

Potential finish(Potential pot) {
  pot.hessian_floor = estimate_hessian_floor(pot);
  pot.convexity_radius = estimate_convexity_radius(pot);
  return pot;
}

}  // namespace

Potential make_product_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale) {
  return make_product_well(p1, p2, p3, scale, {1.0, 1.0, 1.0});
}

Potential make_product_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale,
                            const std::array<double, 3>& coeffs) {
  check_wells(p1, p2, p3);
  if (scale <= 0.0 || coeffs[0] <= 0.0 || coeffs[1] <= 0.0 || coeffs[2] <= 0.0)
    throw ValidationError("invalid wells: scale and coefficients must be positive");
  Potential pot;
  pot.family = PotentialFamily::product;
  pot.wells = {p1, p2, p3};
  pot.scale = scale;
  pot.coeffs = coeffs;
  return finish(pot);
}

Potential make_perturbed_well(Vec2 p1, Vec2 p2, Vec2 p3, double scale, double eps,
                              Vec2 bump_center, double bump_width) {
  check_wells(p1, p2, p3);
  if (eps <= -1.0) throw ValidationError("invalid wells: eps must keep 1 + eps*g positive");
  if (bump_width <= 0.0) throw ValidationError("invalid wells: bump width must be positive");
  Potential pot;
  pot.family = PotentialFamily::perturbed;
  pot.wells = {p1, p2, p3};
  pot.scale = scale;
  pot.eps = eps;
  pot.bump_center = bump_center;
  pot.bump_width = bump_width;
  return finish(pot);
}

Potential symmetric_well() {
  return make_product_well({1.0, 0.0}, {-0.5, std::sqrt(3.0) / 2.0},
                           {-0.5, -std::sqrt(3.0) / 2.0}, 1.0);
}

ValidationReport validate(const Potential& pot) {
  ValidationReport rep;
  rep.hessian_floor = pot.hessian_floor;
  rep.convexity_radius = pot.convexity_radius;

  const double zero_tol = 1e-10;
  rep.wells_are_zeros = true;
  for (const Vec2& p : pot.wells) {
    if (std::abs(pot.eval(p)) > zero_tol || norm(pot.grad(p)) > zero_tol)
      rep.wells_are_zeros = false;
  }

  rep.hessian_positive = pot.hessian_floor > 1e-6;

  // positivity off the wells on a sampled grid over the padded hull
  rep.positive_away_from_wells = true;
  double diam = pot.well_diameter();
  Vec2 center = (pot.wells[0] + pot.wells[1] + pot.wells[2]) / 3.0;
  const int n = 64;
  for (int i = 0; i <= n && rep.positive_away_from_wells; ++i)
    for (int j = 0; j <= n; ++j) {
      Vec2 u = center + Vec2{(2.0 * i / n - 1.0), (2.0 * j / n - 1.0)} * (1.2 * diam);
      double dw = std::min({dist(u, pot.wells[0]), dist(u, pot.wells[1]), dist(u, pot.wells[2])});
      if (dw > 1e-3 && pot.eval(u) <= 0.0) {
        rep.positive_away_from_wells = false;
        break;
      }
    }

  // radial monotonicity p . grad W >= 0 outside a ball of radius M
  rep.radial_bound_M = norm(center) + 2.0 * diam;
  rep.radially_monotone = true;
  for (int k = 0; k < 64 && rep.radially_monotone; ++k) {
    double ang = 2.0 * pi() * k / 64.0;
    for (double factor : {1.0, 1.5, 2.5, 4.0}) {
      Vec2 p = Vec2{std::cos(ang), std::sin(ang)} * (rep.radial_bound_M * factor);
      if (dot(p, pot.grad(p)) < 0.0) {
        rep.radially_monotone = false;
        break;
      }
    }
  }
  return rep;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "wells_are_zeros=" << (wells_are_zeros ? "yes" : "no")
      << " hessian_floor=" << hessian_floor << (hessian_positive ? "" : " (FLAGGED)")
      << " positive_away_from_wells=" << (positive_away_from_wells ? "yes" : "FLAGGED")
      << " radially_monotone(M=" << radial_bound_M << ")="
      << (radially_monotone ? "yes" : "FLAGGED") << " convexity_radius=" << convexity_radius;
  switch (triangle) {
    case Triangle::unchecked: out << " triangle=unchecked"; break;
    case Triangle::strict: out << " triangle=strict"; break;
    case Triangle::marginal: out << " triangle=MARGINAL"; break;
    case Triangle::violated: out << " triangle=VIOLATED"; break;
  }
  return out.str();
}

Config Potential::to_config() const {
  Config cfg;
  const std::string s = "potential";
  cfg.set(s, "family", family == PotentialFamily::product ? "product" : "perturbed");
  for (int l = 0; l < 3; ++l) {
    cfg.set(s, "well" + std::to_string(l + 1),
            format_double(wells[l].x) + " " + format_double(wells[l].y));
    cfg.set_double(s, "coeff" + std::to_string(l + 1), coeffs[l]);
  }
  cfg.set_double(s, "scale", scale);
  if (family == PotentialFamily::perturbed) {
    cfg.set_double(s, "eps", eps);
    cfg.set(s, "bump_center", format_double(bump_center.x) + " " + format_double(bump_center.y));
    cfg.set_double(s, "bump_width", bump_width);
  }
  return cfg;
}

Potential Potential::from_config(const Config& cfg, const std::string& section) {
  auto read_vec = [&](const std::string& key) {
    std::vector<double> v = cfg.get_doubles(section, key);
    if (v.size() != 2) throw ValidationError("expected two coordinates for " + key);
    return Vec2{v[0], v[1]};
  };
  std::string family = cfg.get_or(section, "family", "product");
  Vec2 p1 = read_vec("well1"), p2 = read_vec("well2"), p3 = read_vec("well3");
  double scale = cfg.get_double_or(section, "scale", 1.0);
  if (family == "product") {
    std::array<double, 3> coeffs = {cfg.get_double_or(section, "coeff1", 1.0),
                                    cfg.get_double_or(section, "coeff2", 1.0),
                                    cfg.get_double_or(section, "coeff3", 1.0)};
    return make_product_well(p1, p2, p3, scale, coeffs);
  }
  if (family == "perturbed") {
    return make_perturbed_well(p1, p2, p3, scale, cfg.get_double(section, "eps"),
                               read_vec("bump_center"), cfg.get_double(section, "bump_width"));
  }
  throw ValidationError("unknown potential family: " + family);
}

}  // namespace twac
