#include "twac/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "twac/errors.hpp"

namespace twac {

namespace {

bool deep_interior(const Field& f, int i, int j, int margin = 1) {
  for (int dj = -margin; dj <= margin; ++dj)
    for (int di = -margin; di <= margin; ++di) {
      int a = i + di, b = j + dj;
      if (a < 0 || b < 0 || a >= f.nx || b >= f.ny) return false;
      if (f.kind(a, b) == NodeKind::outside) return false;
    }
  return true;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= 0.0 || y[k] <= 0.0) continue;
    double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

StressField stress_tensor(const Field& f, const Potential& pot) {
  StressField out;
  out.nx = f.nx;
  out.ny = f.ny;
  out.tensor.assign(f.values.size(), Mat2{});
  const double h = f.spacing;
  for (int j = 1; j < f.ny - 1; ++j)
    for (int i = 1; i < f.nx - 1; ++i) {
      if (!deep_interior(f, i, j)) continue;
      Vec2 ux = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
      Vec2 uy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
      double e = 0.5 * (norm_sq(ux) + norm_sq(uy)) + pot.eval(f.at(i, j));
      out.tensor[f.idx(i, j)] = {dot(ux, ux) - e, dot(ux, uy), dot(uy, uy) - e};
    }
  // discrete divergence: (d/dx T11 + d/dy T12, d/dx T12 + d/dy T22)
  double sum2 = 0.0;
  long count = 0;
  for (int j = 2; j < f.ny - 2; ++j)
    for (int i = 2; i < f.nx - 2; ++i) {
      if (!deep_interior(f, i, j, 2)) continue;
      const Mat2& xp = out.tensor[f.idx(i + 1, j)];
      const Mat2& xm = out.tensor[f.idx(i - 1, j)];
      const Mat2& yp = out.tensor[f.idx(i, j + 1)];
      const Mat2& ym = out.tensor[f.idx(i, j - 1)];
      double div_x = (xp.xx - xm.xx) / (2.0 * h) + (yp.xy - ym.xy) / (2.0 * h);
      double div_y = (xp.xy - xm.xy) / (2.0 * h) + (yp.yy - ym.yy) / (2.0 * h);
      double mag = std::hypot(div_x, div_y);
      out.max_divergence = std::max(out.max_divergence, mag);
      sum2 += mag * mag * h * h;
      ++count;
    }
  out.l2_divergence = count ? std::sqrt(sum2) : 0.0;
  return out;
}

namespace {

double bulk_w_integral(const Field& f, const Potential& pot, double r) {
  const Vec2 c = f.center();
  double h2 = f.spacing * f.spacing;
  double s = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      if (dist(f.pos(i, j), c) > r) continue;
      s += pot.eval(f.at(i, j)) * h2;
    }
  return s;
}

void require_circle_inside(const Field& f, double r, const char* who) {
  double max_r = (f.domain == DomainShape::disc)
                     ? f.disc_radius()
                     : 0.5 * std::min((f.nx - 1), (f.ny - 1)) * f.spacing;
  if (r <= 0.0 || r > max_r - 2.0 * f.spacing)
    throw ValidationError(std::string(who) + ": circle exits the domain");
}

}  // namespace

double pohozaev_residual(const Field& f, const Potential& pot, double r, int samples) {
  require_circle_inside(f, r, "pohozaev_residual");
  const Vec2 c = f.center();
  double boundary = 0.0;
  for (int k = 0; k < samples; ++k) {
    double th = 2.0 * pi() * k / samples;
    Vec2 nu{std::cos(th), std::sin(th)};
    Vec2 tangent = perp(nu);
    Vec2 x = c + nu * r;
    Vec2 dux, duy;
    f.sample_gradient(x, dux, duy);
    Vec2 u_nu{dux.x * nu.x + duy.x * nu.y, dux.y * nu.x + duy.y * nu.y};
    Vec2 u_s{dux.x * tangent.x + duy.x * tangent.y, dux.y * tangent.x + duy.y * tangent.y};
    double w = pot.eval(f.sample(x));
    boundary += 0.5 * norm_sq(u_nu) - 0.5 * norm_sq(u_s) - w;
  }
  boundary *= 0.5 * (2.0 * pi() * r / samples);
  return boundary + bulk_w_integral(f, pot, r) / r;
}

WtildeProfile wtilde_profile(const Field& f, const Potential& pot,
                             const std::vector<double>& radii) {
  WtildeProfile out;
  out.radii = radii;
  for (double r : radii) out.values.push_back(bulk_w_integral(f, pot, r) / r);

  // tail average and variation over the last octave
  double rmax = *std::max_element(radii.begin(), radii.end());
  double lo = 1e300, hi = -1e300, sum = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < 0.5 * rmax - 1e-12) continue;
    lo = std::min(lo, out.values[k]);
    hi = std::max(hi, out.values[k]);
    sum += out.values[k];
    ++m;
  }
  out.l0_estimate = m ? sum / m : 0.0;
  out.tail_variation = (m && hi > 0.0) ? (hi - lo) / hi : 0.0;

  // allowance from the equipartition scaling: defect ~ R^{1-alpha} gives a
  // drop bound C3 R^{-alpha/2} between R and 2R
  DefectProfile defect = equipartition_defect(f, pot, radii);
  out.alpha_fit = std::clamp(1.0 - defect.fitted_exponent, 0.05, 2.0);

  // least-squares C3 over the observed drops, then the residual defect
  double num = 0.0, den = 0.0;
  std::vector<std::array<double, 2>> drops;  // (drop, allowance basis)
  for (std::size_t a = 0; a < radii.size(); ++a)
    for (std::size_t b = a + 1; b < radii.size(); ++b) {
      if (radii[b] > 2.0 * radii[a] + 1e-9) continue;
      double drop = out.values[a] - out.values[b];
      double basis = std::pow(radii[a], -0.5 * out.alpha_fit);
      if (drop > 0.0) {
        num += drop * basis;
        den += basis * basis;
      }
      drops.push_back({drop, basis});
    }
  out.c3_fit = den > 0.0 ? num / den : 0.0;
  for (const auto& [drop, basis] : drops)
    out.monotonicity_defect =
        std::max(out.monotonicity_defect, drop - 1.25 * out.c3_fit * basis);
  out.monotonicity_defect = std::max(out.monotonicity_defect, 0.0);
  return out;
}

DefectProfile equipartition_defect(const Field& f, const Potential& pot,
                                   const std::vector<double>& radii) {
  DefectProfile out;
  out.radii = radii;
  const Vec2 c = f.center();
  const double h = f.spacing;
  double rmax = *std::max_element(radii.begin(), radii.end());

  // density accumulated once, then binned by radius
  std::vector<double> density;  // per included node
  std::vector<double> rad;
  for (int j = 1; j < f.ny - 1; ++j)
    for (int i = 1; i < f.nx - 1; ++i) {
      if (!deep_interior(f, i, j)) continue;
      double r = dist(f.pos(i, j), c);
      if (r > rmax) continue;
      Vec2 ux = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
      Vec2 uy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
      double g = std::sqrt(norm_sq(ux) + norm_sq(uy));
      double d = std::sqrt(pot.eval(f.at(i, j))) - g / std::sqrt(2.0);
      density.push_back(d * d * h * h);
      rad.push_back(r);
    }
  for (double r : radii) {
    double s = 0.0;
    for (std::size_t k = 0; k < density.size(); ++k)
      if (rad[k] <= r) s += density[k];
    out.values.push_back(s);
  }
  out.fitted_exponent = loglog_slope(out.radii, out.values);

  // one-sided 95% bound on the slope from the regression residuals
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < out.radii.size(); ++k)
    if (out.radii[k] > 0.0 && out.values[k] > 0.0) {
      lx.push_back(std::log(out.radii[k]));
      ly.push_back(std::log(out.values[k]));
    }
  out.exponent_upper95 = out.fitted_exponent;
  if (lx.size() >= 3) {
    double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k];
      my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, rss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) sxx += (lx[k] - mx) * (lx[k] - mx);
    for (std::size_t k = 0; k < lx.size(); ++k) {
      double fit = my + out.fitted_exponent * (lx[k] - mx);
      rss += (ly[k] - fit) * (ly[k] - fit);
    }
    double se = std::sqrt(rss / (n - 2.0) / sxx);
    // one-sided t quantiles at 95% for small dof
    static const double t95[] = {6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860};
    int dof = static_cast<int>(n) - 2;
    double t = dof <= 8 ? t95[dof - 1] : 1.7;
    out.exponent_upper95 = out.fitted_exponent + t * se;
  }
  return out;
}

double radial_energy(const Field& f, double r1, double r2) {
  if (!(r2 > r1 && r1 >= 0.0)) throw ValidationError("radial_energy: degenerate annulus");
  require_circle_inside(f, r2, "radial_energy");
  const Vec2 c = f.center();
  const double h = f.spacing;
  double s = 0.0;
  for (int j = 1; j < f.ny - 1; ++j)
    for (int i = 1; i < f.nx - 1; ++i) {
      if (!deep_interior(f, i, j)) continue;
      Vec2 x = f.pos(i, j) - c;
      double r = norm(x);
      if (r < r1 || r > r2 || r < 1e-12) continue;
      Vec2 nu = x / r;
      Vec2 ux = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
      Vec2 uy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
      Vec2 u_nu{ux.x * nu.x + uy.x * nu.y, ux.y * nu.x + uy.y * nu.y};
      s += norm_sq(u_nu) / r * h * h;
    }
  return s;
}

// ------------------------------------------------------------- classification

namespace {

struct NodeCache {
  std::vector<double> theta;     // angle about the center
  std::vector<double> sdist[3];  // |u - p_l| per node
  std::vector<Vec2> xy;          // position relative to center
  double area = 0.0;             // per-node cell area
};

NodeCache collect_nodes(const Field& f, const Potential& pot) {
  NodeCache cache;
  const Vec2 c = f.center();
  double half = (f.domain == DomainShape::disc)
                    ? f.disc_radius() / std::sqrt(2.0)
                    : 0.25 * std::min(f.nx - 1, f.ny - 1) * f.spacing;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      Vec2 x = f.pos(i, j) - c;
      if (std::abs(x.x) > half || std::abs(x.y) > half) continue;  // inscribed square
      cache.xy.push_back(x);
      cache.theta.push_back(wrap_angle(std::atan2(x.y, x.x)));
      for (int l = 0; l < 3; ++l)
        cache.sdist[l].push_back(dist(f.at(i, j), pot.wells[l]));
    }
  cache.area = f.spacing * f.spacing;
  return cache;
}

double constant_fit(const NodeCache& cache, int* best_label) {
  double best = 1e300;
  for (int l = 0; l < 3; ++l) {
    double s = 0.0;
    for (double d : cache.sdist[l]) s += d;
    s *= cache.area;
    if (s < best) {
      best = s;
      *best_label = l;
    }
  }
  return best;
}

double junction_fit(const NodeCache& cache, const std::array<double, 3>& alphas, int steps,
                    JunctionMap* best_map) {
  // bin the per-well distances by angle; a rotation is a bin shift
  const int B = steps;
  std::vector<double> binsum[3];
  for (int l = 0; l < 3; ++l) binsum[l].assign(B, 0.0);
  for (std::size_t k = 0; k < cache.theta.size(); ++k) {
    int b = std::min(static_cast<int>(cache.theta[k] / (2.0 * pi()) * B), B - 1);
    for (int l = 0; l < 3; ++l) binsum[l][b] += cache.sdist[l][k];
  }
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best = 1e300;
  int best_rot = 0, best_perm = 0;
  for (int p = 0; p < 6; ++p) {
    // sector of a bin offset: sector 0 spans [0, a0), 1: [a0, a0+a1), ...
    std::array<double, 3> a{alphas[perms[p][0]], alphas[perms[p][1]], alphas[perms[p][2]]};
    // wait: sector k has opening angle alpha of the label assigned there.
    std::vector<int> label_of_offset(B);
    for (int b = 0; b < B; ++b) {
      double ang = (b + 0.5) * 2.0 * pi() / B;
      int sec = ang < a[0] ? 0 : (ang < a[0] + a[1] ? 1 : 2);
      label_of_offset[b] = perms[p][sec];
    }
    for (int rot = 0; rot < B; ++rot) {
      double s = 0.0;
      for (int b = 0; b < B; ++b) {
        int off = b - rot;
        if (off < 0) off += B;
        s += binsum[label_of_offset[off]][b];
      }
      if (s < best) {
        best = s;
        best_rot = rot;
        best_perm = p;
      }
    }
  }
  if (best_map) {
    std::array<int, 3> assign{perms[best_perm][0], perms[best_perm][1], perms[best_perm][2]};
    std::array<double, 3> angles{alphas[assign[0]], alphas[assign[1]], alphas[assign[2]]};
    *best_map = make_junction_map(angles, 2.0 * pi() * best_rot / B, assign);
  }
  return best * cache.area;
}

double halfplane_fit(const NodeCache& cache, const ClassifyThresholds& t, double domain_radius,
                     HalfPlaneFit* best_fit) {
  const int NB = 256;  // offset buckets along the normal
  double best = 1e300;
  for (int astep = 0; astep < t.halfplane_angle_steps; ++astep) {
    double angle = pi() * astep / t.halfplane_angle_steps;  // boundary direction
    Vec2 normal{-std::sin(angle), std::cos(angle)};
    // bucket the three distance sums by signed offset
    double span = domain_radius;
    std::vector<double> bucket[3];
    for (int l = 0; l < 3; ++l) bucket[l].assign(NB, 0.0);
    for (std::size_t k = 0; k < cache.xy.size(); ++k) {
      double s = dot(cache.xy[k], normal);
      int b = std::clamp(static_cast<int>((s + span) / (2.0 * span) * NB), 0, NB - 1);
      for (int l = 0; l < 3; ++l) bucket[l][b] += cache.sdist[l][k];
    }
    // prefix sums
    double pre[3][257];
    for (int l = 0; l < 3; ++l) {
      pre[l][0] = 0.0;
      for (int b = 0; b < NB; ++b) pre[l][b + 1] = pre[l][b] + bucket[l][b];
    }
    for (int ostep = 0; ostep < t.halfplane_offset_steps; ++ostep) {
      double off = (t.halfplane_offset_steps == 1)
                       ? 0.0
                       : (-1.0 + 2.0 * ostep / (t.halfplane_offset_steps - 1)) *
                             t.halfplane_offset_span * domain_radius;
      int cut = std::clamp(static_cast<int>((off + span) / (2.0 * span) * NB), 0, NB);
      for (int lp = 0; lp < 3; ++lp)
        for (int ln = 0; ln < 3; ++ln) {
          if (lp == ln) continue;
          double s = (pre[ln][cut]) + (pre[lp][NB] - pre[lp][cut]);
          if (s < best) {
            best = s;
            if (best_fit) *best_fit = {angle, off, lp, ln};
          }
        }
    }
  }
  return best * cache.area;
}

}  // namespace

std::pair<double, JunctionMap> distance_to_A(const Field& f, const Potential& pot,
                                             const PairwiseCosts& costs, int rotation_steps) {
  NodeCache cache = collect_nodes(f, pot);
  auto alphas = junction_angles(costs.c12, costs.c13, costs.c23);
  JunctionMap map;
  double d = junction_fit(cache, alphas, rotation_steps, &map);
  map.center = f.center();
  return {d, map};
}

std::string BlowdownReport::classification_name() const {
  switch (classification) {
    case BlowdownClass::constant: return "constant";
    case BlowdownClass::half_plane: return "half-plane";
    case BlowdownClass::triple_junction: return "triple-junction";
    default: return "inconclusive";
  }
}

BlowdownReport classify_blowdown(const Field& f, const Potential& pot, const PairwiseCosts& costs,
                                 const std::vector<double>& radii,
                                 const ClassifyThresholds& thresholds) {
  BlowdownReport rep;
  rep.radii = radii;
  if (!radii.empty()) {
    WtildeProfile wt = wtilde_profile(f, pot, radii);
    rep.wtilde = wt.values;
    rep.l0_estimate = wt.l0_estimate;
    rep.wtilde_tail_variation = wt.tail_variation;
    rep.monotonicity_defect = wt.monotonicity_defect;
    DefectProfile defect = equipartition_defect(f, pot, radii);
    rep.defect = defect.values;
    rep.defect_exponent = defect.fitted_exponent;
    for (double r : radii) rep.radial_term.push_back(radial_energy(f, 0.5 * r, r));
  }

  NodeCache cache = collect_nodes(f, pot);
  double domain_radius =
      f.domain == DomainShape::disc ? f.disc_radius() : 0.5 * (f.nx - 1) * f.spacing;

  int const_label = 0;
  rep.constant_distance = constant_fit(cache, &const_label);
  rep.constant_label = const_label;

  HalfPlaneFit hp;
  rep.halfplane_distance = halfplane_fit(cache, thresholds, domain_radius, &hp);

  auto alphas = junction_angles(costs.c12, costs.c13, costs.c23);
  JunctionMap jm;
  rep.junction_distance = junction_fit(cache, alphas, thresholds.rotation_steps, &jm);
  jm.center = f.center();

  double area = 2.0 * domain_radius * domain_radius;  // inscribed square
  struct Cand {
    BlowdownClass cls;
    double d;
  };
  std::array<Cand, 3> cands{{{BlowdownClass::constant, rep.constant_distance},
                             {BlowdownClass::half_plane, rep.halfplane_distance},
                             {BlowdownClass::triple_junction, rep.junction_distance}}};
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
  rep.best_distance = cands[0].d;
  rep.best_distance_per_area = cands[0].d / area;
  rep.classification = BlowdownClass::inconclusive;
  if (cands[0].d < (1.0 - thresholds.margin) * cands[1].d) rep.classification = cands[0].cls;
  if (rep.classification == BlowdownClass::triple_junction &&
      rep.best_distance_per_area > thresholds.junction_max_distance)
    rep.classification = BlowdownClass::inconclusive;
  if (rep.classification == BlowdownClass::triple_junction) rep.junction_fit = jm;
  if (rep.classification == BlowdownClass::half_plane) rep.halfplane_fit = hp;
  return rep;
}

std::string BlowdownReport::to_csv() const {
  std::ostringstream out;
  out << "R,wtilde,equipartition_defect,radial_term\n";
  for (std::size_t k = 0; k < radii.size(); ++k)
    out << format_double(radii[k]) << ',' << format_double(wtilde[k]) << ','
        << format_double(defect[k]) << ',' << format_double(radial_term[k]) << '\n';
  return out.str();
}

Config BlowdownReport::summary() const {
  Config cfg;
  const std::string s = "blowdown_report";
  cfg.set(s, "classification", classification_name());
  cfg.set_double(s, "best_distance", best_distance);
  cfg.set_double(s, "best_distance_per_area", best_distance_per_area);
  cfg.set_double(s, "constant_distance", constant_distance);
  cfg.set_double(s, "halfplane_distance", halfplane_distance);
  cfg.set_double(s, "junction_distance", junction_distance);
  cfg.set_double(s, "l0_estimate", l0_estimate);
  cfg.set_double(s, "defect_exponent", defect_exponent);
  cfg.set_double(s, "wtilde_tail_variation", wtilde_tail_variation);
  cfg.set_double(s, "monotonicity_defect", monotonicity_defect);
  cfg.set_int(s, "constant_label", constant_label);
  return cfg;
}

// --------------------------------------------------------------- circle trace

CircleProfile circle_profile(const Field& f, const Potential& pot, double rho, int samples) {
  require_circle_inside(f, rho, "circle_profile");
  CircleProfile prof;
  prof.rho = rho;
  const Vec2 c = f.center();
  prof.theta.resize(samples);
  prof.value.resize(samples);
  for (int k = 0; k < samples; ++k) {
    double th = 2.0 * pi() * k / samples;
    prof.theta[k] = th;
    prof.value[k] = f.sample(c + Vec2{std::cos(th), std::sin(th)} * rho);
  }
  double ds = 2.0 * pi() * rho / samples;
  for (int k = 0; k < samples; ++k) {
    int k2 = (k + 1) % samples;
    Vec2 dv = (prof.value[k2] - prof.value[k]) / ds;
    Vec2 mid = (prof.value[k2] + prof.value[k]) * 0.5;
    prof.full_energy += (pot.eval(mid) + 0.5 * norm_sq(dv)) * ds;
  }

  // transition level W0: min of W over circles of radius d0 about the wells
  double d0 = 0.25 * pot.min_well_separation();
  prof.w0 = 1e300;
  for (const Vec2& p : pot.wells)
    for (int k = 0; k < 256; ++k) {
      double a = 2.0 * pi() * k / 256;
      prof.w0 = std::min(prof.w0, pot.eval(p + Vec2{std::cos(a), std::sin(a)} * d0));
    }

  std::vector<double> w(samples);
  for (int k = 0; k < samples; ++k) w[k] = pot.eval(prof.value[k]);

  for (int k = 0; k < samples; ++k) {
    int k2 = (k + 1) % samples;
    if ((w[k] - prof.w0) * (w[k2] - prof.w0) < 0.0) {
      double t = (prof.w0 - w[k]) / (w[k2] - w[k]);
      prof.hit_angles.push_back(wrap_angle(prof.theta[k] + t * 2.0 * pi() / samples));
    }
  }

  // maximal runs with W > W0 form the transition windows
  std::vector<std::pair<int, int>> runs;
  int start = -1;
  // find a below-level sample to anchor the circular scan
  int anchor = -1;
  for (int k = 0; k < samples; ++k)
    if (w[k] <= prof.w0) {
      anchor = k;
      break;
    }
  if (anchor >= 0) {
    for (int off = 0; off <= samples; ++off) {
      int k = (anchor + off) % samples;
      bool above = off < samples && w[k] > prof.w0;
      if (above && start < 0) start = off;
      if (!above && start >= 0) {
        runs.push_back({anchor + start, anchor + off - 1});
        start = -1;
      }
    }
  }

  for (auto [a, b] : runs) {
    TransitionWindow win;
    int peak = a;
    for (int off = a; off <= b; ++off)
      if (w[(off) % samples] > w[peak % samples]) peak = off;
    win.theta_peak = wrap_angle(2.0 * pi() * (peak % samples) / samples);
    win.theta_lo = wrap_angle(2.0 * pi() * (a % samples) / samples);
    win.theta_hi = wrap_angle(2.0 * pi() * (b % samples) / samples);
    // wells on each side
    auto nearest_well = [&](int k) {
      int bestl = 0;
      for (int l = 1; l < 3; ++l)
        if (dist(prof.value[k], pot.wells[l]) < dist(prof.value[k], pot.wells[bestl])) bestl = l;
      return bestl;
    };
    win.label_before = nearest_well(((a - 1) % samples + samples) % samples);
    win.label_after = nearest_well((b + 1) % samples);

    // padded window energy: extend to the midpoints toward the neighbor runs
    int pad = (b - a + 1);
    int lo = a - pad, hi = b + pad;
    for (int off = lo; off < hi; ++off) {
      int k = ((off) % samples + samples) % samples;
      int k2 = (k + 1) % samples;
      Vec2 dv = (prof.value[k2] - prof.value[k]) / ds;
      Vec2 mid = (prof.value[k2] + prof.value[k]) * 0.5;
      win.energy += (pot.eval(mid) + 0.5 * norm_sq(dv)) * ds;
    }

    // distance to the matching heteroclinic, aligned at the W-peak
    if (win.label_before != win.label_after && win.label_before >= 0) {
      HeteroclinicProfile zeta = heteroclinic(pot, win.label_before, win.label_after, 12.0, 512);
      double sup = 0.0, h1 = 0.0;
      Vec2 prev_diff{};
      bool first = true;
      for (int off = lo; off <= hi; ++off) {
        int k = ((off) % samples + samples) % samples;
        double s = rho * (off - peak) * 2.0 * pi() / samples;
        Vec2 zv = zeta.at(s);
        Vec2 diff = prof.value[k] - zv;
        sup = std::max(sup, norm(diff));
        if (!first) h1 += norm_sq((diff - prev_diff) / ds) * ds;
        prev_diff = diff;
        first = false;
      }
      win.sup_dist = sup;
      win.h1_dist = std::sqrt(h1);
    }
    prof.windows.push_back(win);
  }
  return prof;
}

std::vector<Vec2> circle_image(const CircleProfile& profile) {
  std::vector<Vec2> poly = profile.value;
  poly.push_back(profile.value.front());
  return poly;
}

}  // namespace twac
