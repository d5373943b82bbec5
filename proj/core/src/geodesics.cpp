#include "twac/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twac/errors.hpp"
#include "twac/rng.hpp"

namespace twac {

double path_length(const Potential& pot, const std::vector<Vec2>& points) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    Vec2 mid = (points[k] + points[k + 1]) * 0.5;
    len += pot.metric_weight(mid) * dist(points[k], points[k + 1]);
  }
  return len;
}

namespace {

// Gradient of the discrete weighted length wrt the interior nodes.
void length_gradient(const Potential& pot, const std::vector<Vec2>& x, std::vector<Vec2>& g) {
  const std::size_t n = x.size();
  g.assign(n, {0.0, 0.0});
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Vec2 d = x[k + 1] - x[k];
    double dl = norm(d);
    Vec2 mid = (x[k] + x[k + 1]) * 0.5;
    double w = pot.metric_weight(mid);
    // grad of sqrt(2W) = grad W / sqrt(2W); guard the degenerate wells
    Vec2 gw = w > 1e-14 ? pot.grad(mid) / w : Vec2{0.0, 0.0};
    Vec2 unit = dl > 0.0 ? d / dl : Vec2{0.0, 0.0};
    g[k] += gw * (0.5 * dl) - unit * w;
    g[k + 1] += gw * (0.5 * dl) + unit * w;
  }
  g.front() = {0.0, 0.0};
  g.back() = {0.0, 0.0};
}

void reparametrize_equal_arclength(std::vector<Vec2>& x) {
  const std::size_t n = x.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) s[k] = s[k - 1] + dist(x[k], x[k - 1]);
  double total = s.back();
  if (total <= 0.0) return;
  std::vector<Vec2> out(n);
  out.front() = x.front();
  out.back() = x.back();
  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double target = total * k / (n - 1);
    while (seg + 2 < n && s[seg + 1] < target) ++seg;
    double w = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
    out[k] = x[seg] * (1.0 - w) + x[seg + 1] * w;
  }
  x = std::move(out);
}

PathSample relax_path(const Potential& pot, std::vector<Vec2> x, const MetricOptions& opts) {
  double len = path_length(pot, x);
  if (len == 0.0) return {std::move(x), 0.0};

  double step = opts.initial_step;
  if (step <= 0.0) {
    // scale the first step to the path extent and weight scale
    double extent = dist(x.front(), x.back());
    if (extent == 0.0) extent = 1.0;
    step = 1e-3 * extent / std::max(pot.metric_weight((x.front() + x.back()) * 0.5), 1e-6);
  }

  std::vector<Vec2> g, trial(x.size());
  double window_start_len = len;
  int sweeps = 0;
  for (; sweeps < opts.max_sweeps; ++sweeps) {
    length_gradient(pot, x, g);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] - g[k] * step;
      double trial_len = path_length(pot, trial);
      if (trial_len <= len) {
        x.swap(trial);
        len = trial_len;
        step *= 1.15;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow: stationary to machine precision

    if ((sweeps + 1) % opts.window == 0) {
      reparametrize_equal_arclength(x);
      len = path_length(pot, x);
      if (sweeps > 4 * opts.window &&
          std::abs(window_start_len - len) < opts.tol * std::max(1.0, len))
        return {std::move(x), len};
      window_start_len = len;
    }
  }
  if (sweeps >= opts.max_sweeps) {
    double gn = 0.0;
    for (const Vec2& v : g) gn = std::max(gn, norm(v));
    std::ostringstream msg;
    msg << "metric_distance: path relaxation did not converge (len=" << len
        << ", max|grad|=" << gn << ", last iterate with " << x.size() << " nodes)";
    throw ConvergenceError(msg.str(), gn, sweeps);
  }
  reparametrize_equal_arclength(x);
  return {std::move(x), path_length(pot, x)};
}

std::vector<Vec2> straight_init(Vec2 p, Vec2 q, int n) {
  std::vector<Vec2> x(n + 1);
  for (int k = 0; k <= n; ++k) {
    double t = static_cast<double>(k) / n;
    x[k] = p * (1.0 - t) + q * t;
  }
  return x;
}

}  // namespace

PathSample metric_distance(const Potential& pot, Vec2 p, Vec2 q, int n,
                           const MetricOptions& opts) {
  if (n < 8) throw ValidationError("metric_distance: need n >= 8 path nodes");
  if (dist(p, q) == 0.0) return {std::vector<Vec2>(n + 1, p), 0.0};
  return relax_path(pot, straight_init(p, q, n), opts);
}

double PairwiseCosts::cost(int i, int j) const {
  int a = std::min(i, j), b = std::max(i, j);
  if (a == 0 && b == 1) return c12;
  if (a == 0 && b == 2) return c13;
  if (a == 1 && b == 2) return c23;
  throw ValidationError("pairwise cost: indices must be distinct in {0,1,2}");
}

PairwiseCosts pairwise_costs(const Potential& pot, int n) {
  PairwiseCosts c;
  c.c12 = metric_distance(pot, pot.wells[0], pot.wells[1], n).length;
  c.c13 = metric_distance(pot, pot.wells[0], pot.wells[2], n).length;
  c.c23 = metric_distance(pot, pot.wells[1], pot.wells[2], n).length;
  double m12 = (c.c13 + c.c23 - c.c12) / (c.c13 + c.c23);
  double m13 = (c.c12 + c.c23 - c.c13) / (c.c12 + c.c23);
  double m23 = (c.c12 + c.c13 - c.c23) / (c.c12 + c.c13);
  c.margin = std::min({m12, m13, m23});
  c.strict_triangle = c.margin > 0.0;
  return c;
}

void fill_triangle_status(ValidationReport& rep, const PairwiseCosts& costs,
                          double marginal_tol) {
  rep.triangle_margin = costs.margin;
  if (costs.margin <= 0.0)
    rep.triangle = ValidationReport::Triangle::violated;
  else if (costs.margin < marginal_tol)
    rep.triangle = ValidationReport::Triangle::marginal;
  else
    rep.triangle = ValidationReport::Triangle::strict;
}

Vec2 HeteroclinicProfile::at(double time) const {
  if (t.empty()) return {0.0, 0.0};
  if (time <= t.front()) return value.front();
  if (time >= t.back()) return value.back();
  double dt = t[1] - t[0];
  std::size_t k = static_cast<std::size_t>((time - t.front()) / dt);
  k = std::min(k, t.size() - 2);
  double w = (time - t[k]) / dt;
  return value[k] * (1.0 - w) + value[k + 1] * w;
}

namespace {

double action_energy(const Potential& pot, const std::vector<double>& t,
                     const std::vector<Vec2>& z) {
  const std::size_t n = z.size();
  double dt = t[1] - t[0];
  double e = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    e += 0.5 * (pot.eval(z[k]) + pot.eval(z[k + 1])) * dt;
    e += 0.5 * norm_sq(z[k + 1] - z[k]) / dt;
  }
  return e;
}

// Thomas solve of (I - tau D2) z_new = rhs with clamped ends.
void semi_implicit_sweep(std::vector<Vec2>& z, const std::vector<Vec2>& rhs, double lam,
                         std::vector<double>& cp, std::vector<Vec2>& dp) {
  const std::size_t n = z.size();
  // rows: z_0 = rhs_0 ; -lam z_{k-1} + (1+2 lam) z_k - lam z_{k+1} = rhs_k ; z_{n-1} = rhs_{n-1}
  cp.assign(n, 0.0);
  dp.assign(n, {0.0, 0.0});
  cp[0] = 0.0;
  dp[0] = rhs[0];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double m = (1.0 + 2.0 * lam) - (-lam) * cp[k - 1];
    cp[k] = -lam / m;
    dp[k] = (rhs[k] + dp[k - 1] * lam) / m;
  }
  double m = 1.0;
  dp[n - 1] = rhs[n - 1] / m;
  z[n - 1] = dp[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) z[k] = dp[k] - z[k + 1] * cp[k];
}

void pin_translate_at_w_max(const Potential& pot, std::vector<double>& t, std::vector<Vec2>& z) {
  // find the sample of max W, refine by quadratic interpolation, then shift
  // the time grid so that the maximum sits at t = 0 (values resampled).
  std::size_t kmax = 0;
  double wmax = -1.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    double w = pot.eval(z[k]);
    if (w > wmax) {
      wmax = w;
      kmax = k;
    }
  }
  double dt = t[1] - t[0];
  double shift = t[kmax];
  if (kmax > 0 && kmax + 1 < z.size()) {
    double wm = pot.eval(z[kmax - 1]), wp = pot.eval(z[kmax + 1]);
    double denom = wm - 2.0 * wmax + wp;
    if (denom < 0.0) shift += 0.5 * dt * (wm - wp) / denom;
  }
  // resample z(t + shift) on the same grid; clamp past the ends to the wells
  std::vector<Vec2> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    double tq = t[k] + shift;
    if (tq <= t.front()) {
      out[k] = z.front();
    } else if (tq >= t.back()) {
      out[k] = z.back();
    } else {
      std::size_t m = static_cast<std::size_t>((tq - t.front()) / dt);
      m = std::min(m, z.size() - 2);
      double w = (tq - t[m]) / dt;
      out[k] = z[m] * (1.0 - w) + z[m + 1] * w;
    }
  }
  z = std::move(out);
}

}  // namespace

HeteroclinicProfile heteroclinic(const Potential& pot, int i, int j, double T, int n,
                                 const HeteroOptions& opts) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2)
    throw ValidationError("heteroclinic: well indices must be distinct in {0,1,2}");
  if (n < 16) throw ValidationError("heteroclinic: need n >= 16 samples");

  HeteroclinicProfile prof;
  prof.i = i;
  prof.j = j;
  prof.t.resize(n + 1);
  prof.value.resize(n + 1);
  double dt = 2.0 * T / n;
  Vec2 pi_ = pot.wells[i], pj = pot.wells[j];
  for (int k = 0; k <= n; ++k) {
    prof.t[k] = -T + k * dt;
    double s = 1.0 / (1.0 + std::exp(-2.0 * prof.t[k]));  // sigmoid initial transition
    prof.value[k] = pi_ * (1.0 - s) + pj * s;
  }
  prof.value.front() = pi_;
  prof.value.back() = pj;

  double tau = opts.tau;
  double lam = tau / (dt * dt);
  std::vector<Vec2> rhs(n + 1);
  std::vector<double> cp;
  std::vector<Vec2> dp;
  double last_energy = action_energy(pot, prof.t, prof.value);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    for (int k = 0; k <= n; ++k) rhs[k] = prof.value[k] - pot.grad(prof.value[k]) * tau;
    rhs[0] = pi_;
    rhs[n] = pj;
    semi_implicit_sweep(prof.value, rhs, lam, cp, dp);
    if ((it + 1) % 200 == 0) {
      double e = action_energy(pot, prof.t, prof.value);
      if (opts.energy_history) opts.energy_history->push_back(e);
      if (e > last_energy + 1e-12) {
        // energy must not increase along the relaxation; halve the step
        tau *= 0.5;
        lam = tau / (dt * dt);
      } else if (last_energy - e < opts.energy_tol * std::max(1.0, e) && it > 1000) {
        last_energy = e;
        converged = true;
        break;
      }
      last_energy = e;
    }
  }
  if (!converged && it >= opts.max_iters)
    throw ConvergenceError("heteroclinic: relaxation did not converge", last_energy, it);

  if (opts.pin_translate) pin_translate_at_w_max(pot, prof.t, prof.value);

  prof.energy = action_energy(pot, prof.t, prof.value);

  // diagnostics: first integral and ODE residual over the interior
  prof.max_first_integral_dev = 0.0;
  prof.ode_residual = 0.0;
  for (int k = 1; k < n; ++k) {
    Vec2 d = (prof.value[k + 1] - prof.value[k - 1]) / (2.0 * dt);
    double dev = std::abs(0.5 * norm_sq(d) - pot.eval(prof.value[k]));
    prof.max_first_integral_dev = std::max(prof.max_first_integral_dev, dev);
    Vec2 second = (prof.value[k + 1] - prof.value[k] * 2.0 + prof.value[k - 1]) / (dt * dt);
    prof.ode_residual = std::max(prof.ode_residual, norm(second - pot.grad(prof.value[k])));
  }

  // truncation check: near the clamped ends the profile must have settled at
  // its wells (position inside the convexity radius, and the potential force
  // nearly zero; a clamped ramp on a too-short interval fails the latter).
  double beta = pot.convexity_radius;
  int tail = std::max(1, n / 20);
  double max_force = 0.0, tail_force = 0.0;
  for (int k = 0; k <= n; ++k) {
    double g = norm(pot.grad(prof.value[k]));
    max_force = std::max(max_force, g);
    if (k <= tail || k >= n - tail) tail_force = std::max(tail_force, g);
  }
  if (dist(prof.value[tail], pi_) > beta || dist(prof.value[n - tail], pj) > beta ||
      tail_force > 0.02 * max_force)
    throw TruncationError(
        "heteroclinic: truncation too small, profile ends outside the convexity radius");

  return prof;
}

double decay_rate(const Potential& pot, const HeteroclinicProfile& profile) {
  Vec2 pj = pot.wells[profile.j];
  double beta = std::min(pot.convexity_radius, 0.25 * pot.min_well_separation());
  // usable tail: inside the convexity radius but above numerical noise
  std::vector<double> ts, logs;
  for (std::size_t k = 0; k < profile.t.size(); ++k) {
    if (profile.t[k] <= 0.0) continue;
    double d = dist(profile.value[k], pj);
    if (d < 1e-8 || d > beta) continue;
    ts.push_back(profile.t[k]);
    logs.push_back(std::log(d));
  }
  if (ts.size() < 10)
    throw InsufficientTailError("decay_rate: tail too short for a rate fit");
  double n = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sl += logs[k];
    stt += ts[k] * ts[k];
    stl += ts[k] * logs[k];
  }
  double slope = (n * stl - st * sl) / (n * stt - st * st);
  double rate = -slope;
  if (!(rate > 0.0)) throw InsufficientTailError("decay_rate: fitted rate not positive");
  return rate;
}

void write_profile_csv(const Potential& pot, const HeteroclinicProfile& profile,
                       const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write profile csv: " + path);
  f << "t,u1,u2,W,half_speed_sq\n";
  double dt = profile.t.size() > 1 ? profile.t[1] - profile.t[0] : 1.0;
  for (std::size_t k = 0; k < profile.t.size(); ++k) {
    Vec2 d{0.0, 0.0};
    if (k > 0 && k + 1 < profile.t.size())
      d = (profile.value[k + 1] - profile.value[k - 1]) / (2.0 * dt);
    f << format_double(profile.t[k]) << ',' << format_double(profile.value[k].x) << ','
      << format_double(profile.value[k].y) << ',' << format_double(pot.eval(profile.value[k]))
      << ',' << format_double(0.5 * norm_sq(d)) << '\n';
  }
}

namespace {

// Decimate a polyline so consecutive points are at least min_sep apart;
// keeps the endpoints. Near the wells the heteroclinic samples cluster
// exponentially and would create degenerate segments.
std::vector<Vec2> decimate(const std::vector<Vec2>& pts, double min_sep) {
  std::vector<Vec2> out;
  out.push_back(pts.front());
  for (std::size_t k = 1; k + 1 < pts.size(); ++k)
    if (dist(pts[k], out.back()) >= min_sep) out.push_back(pts[k]);
  out.push_back(pts.back());
  return out;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  double o1 = orient(a, b, c), o2 = orient(a, b, d);
  double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

}  // namespace

LambdaCurve lambda_curve(const HeteroclinicProfile& z12, const HeteroclinicProfile& z23,
                         const HeteroclinicProfile& z13) {
  LambdaCurve curve;
  auto append = [&](const std::vector<Vec2>& pts, bool reversed) {
    if (reversed)
      curve.points.insert(curve.points.end(), pts.rbegin(), pts.rend());
    else
      curve.points.insert(curve.points.end(), pts.begin(), pts.end());
  };
  append(z12.value, false);   // p1 -> p2
  append(z23.value, false);   // p2 -> p3
  append(z13.value, true);    // p3 -> p1
  curve.points.push_back(curve.points.front());

  double scale = 0.0;
  for (const Vec2& p : curve.points) scale = std::max(scale, norm(p - curve.points.front()));
  std::vector<Vec2> slim = decimate(curve.points, 1e-4 * std::max(scale, 1.0));

  curve.is_simple = true;
  const std::size_t m = slim.size() - 1;  // segments; slim is closed
  for (std::size_t a = 0; a < m && curve.is_simple; ++a) {
    for (std::size_t b = a + 2; b < m; ++b) {
      if (a == 0 && b == m - 1) continue;  // closure adjacency
      if (segments_intersect(slim[a], slim[a + 1], slim[b], slim[b + 1])) {
        curve.is_simple = false;
        break;
      }
    }
  }
  return curve;
}

LambdaCurve lambda_curve(const Potential& pot, double T, int n) {
  HeteroclinicProfile z12 = heteroclinic(pot, 0, 1, T, n);
  HeteroclinicProfile z23 = heteroclinic(pot, 1, 2, T, n);
  HeteroclinicProfile z13 = heteroclinic(pot, 0, 2, T, n);
  return lambda_curve(z12, z23, z13);
}

int winding_number(const std::vector<Vec2>& poly, Vec2 point) {
  double scale = 1e-300;
  for (const Vec2& p : poly) scale = std::max(scale, norm(p - point));
  // on-curve check: distance to each segment
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    Vec2 d = poly[k + 1] - poly[k];
    double len2 = norm_sq(d);
    double t = len2 > 0.0 ? std::clamp(dot(point - poly[k], d) / len2, 0.0, 1.0) : 0.0;
    if (dist(point, poly[k] + d * t) < 1e-12 * scale)
      throw OnCurveError("winding_number: query point lies on the curve");
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
    Vec2 a = poly[k] - point, b = poly[k + 1] - point;
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return static_cast<int>(std::lround(total / (2.0 * pi())));
}

UniquenessReport geodesic_uniqueness_probe(const Potential& pot, int i, int j, int trials,
                                           double tol, unsigned long long seed) {
  const int n = 128;
  Rng rng(seed);
  std::vector<std::vector<Vec2>> paths;
  Vec2 p = pot.wells[i], q = pot.wells[j];
  double amp = 0.25 * dist(p, q);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Vec2> x = straight_init(p, q, n);
    // smooth random bow: sum of two sine modes with random amplitudes
    double a1 = rng.uniform(-amp, amp), a2 = rng.uniform(-amp, amp);
    Vec2 nrm = normalized(perp(q - p));
    for (int k = 0; k <= n; ++k) {
      double t = static_cast<double>(k) / n;
      x[k] += nrm * (a1 * std::sin(pi() * t) + a2 * std::sin(2.0 * pi() * t));
    }
    paths.push_back(relax_path(pot, std::move(x), {}).points);
  }
  auto hausdorff = [](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double h = 0.0;
    for (const Vec2& pa : a) {
      double d = 1e300;
      for (const Vec2& pb : b) d = std::min(d, dist(pa, pb));
      h = std::max(h, d);
    }
    return h;
  };
  UniquenessReport rep;
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      double h = std::max(hausdorff(paths[a], paths[b]), hausdorff(paths[b], paths[a]));
      rep.max_hausdorff = std::max(rep.max_hausdorff, h);
    }
  rep.unique = rep.max_hausdorff < tol;
  return rep;
}

}  // namespace twac
