#include "twac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "twac/errors.hpp"
#include "twac/rng.hpp"

namespace twac {

double energy(const Field& f, const Potential& pot, double R) {
  const double h = f.spacing;
  double e = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : e) schedule(static)
#endif
  for (int j = 0; j < f.ny - 1; ++j) {
    for (int i = 0; i < f.nx - 1; ++i) {
      if (f.kind(i, j) == NodeKind::outside || f.kind(i + 1, j) == NodeKind::outside ||
          f.kind(i, j + 1) == NodeKind::outside || f.kind(i + 1, j + 1) == NodeKind::outside)
        continue;
      Vec2 u00 = f.at(i, j), u10 = f.at(i + 1, j), u01 = f.at(i, j + 1), u11 = f.at(i + 1, j + 1);
      Vec2 um = (u00 + u10 + u01 + u11) * 0.25;
      Vec2 ux = ((u10 + u11) - (u00 + u01)) / (2.0 * h);
      Vec2 uy = ((u01 + u11) - (u00 + u10)) / (2.0 * h);
      e += (R * pot.eval(um) + (norm_sq(ux) + norm_sq(uy)) / (2.0 * R)) * h * h;
    }
  }
  return e;
}

double energy_in_ball(const Field& f, const Potential& pot, double R, double r) {
  const double h = f.spacing;
  const Vec2 c = f.center();
  double e = 0.0;
  for (int j = 0; j < f.ny - 1; ++j) {
    for (int i = 0; i < f.nx - 1; ++i) {
      if (f.kind(i, j) == NodeKind::outside || f.kind(i + 1, j) == NodeKind::outside ||
          f.kind(i, j + 1) == NodeKind::outside || f.kind(i + 1, j + 1) == NodeKind::outside)
        continue;
      Vec2 cell_center = f.pos(i, j) + Vec2{0.5 * h, 0.5 * h};
      if (dist(cell_center, c) > r) continue;
      Vec2 u00 = f.at(i, j), u10 = f.at(i + 1, j), u01 = f.at(i, j + 1), u11 = f.at(i + 1, j + 1);
      Vec2 um = (u00 + u10 + u01 + u11) * 0.25;
      Vec2 ux = ((u10 + u11) - (u00 + u01)) / (2.0 * h);
      Vec2 uy = ((u01 + u11) - (u00 + u10)) / (2.0 * h);
      e += (R * pot.eval(um) + (norm_sq(ux) + norm_sq(uy)) / (2.0 * R)) * h * h;
    }
  }
  return e;
}

namespace {

// residual Lap u / R^2 - grad W(u) with Neumann ghost reflection; Dirichlet
// boundary nodes return zero residual (clamped).
inline Vec2 node_residual(const Field& f, const Potential& pot, double R, int i, int j) {
  const double h2 = f.spacing * f.spacing;
  Vec2 u = f.at(i, j);
  Vec2 lap{0.0, 0.0};
  auto add = [&](int a, int b) {
    if (a < 0 || b < 0 || a >= f.nx || b >= f.ny || f.kind(a, b) == NodeKind::outside) {
      // ghost reflection: zero normal flux
      return;
    }
    lap += f.at(a, b) - u;
  };
  add(i - 1, j);
  add(i + 1, j);
  add(i, j - 1);
  add(i, j + 1);
  return lap / (h2 * R * R) - pot.grad(u);
}

// node/edge discrete energy whose gradient flow the sweep performs; used as
// the monotonicity guard (the midpoint-cell `energy` op discretizes the same
// functional differently and may wobble at roundoff scale near convergence)
double edge_energy(const Field& f, const Potential& pot, double R) {
  double bulk = 0.0, grad = 0.0;
  const double h2 = f.spacing * f.spacing;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : bulk, grad) schedule(static)
#endif
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      bulk += pot.eval(f.at(i, j)) * h2;
      if (i + 1 < f.nx && f.kind(i + 1, j) != NodeKind::outside)
        grad += norm_sq(f.at(i + 1, j) - f.at(i, j));
      if (j + 1 < f.ny && f.kind(i, j + 1) != NodeKind::outside)
        grad += norm_sq(f.at(i, j + 1) - f.at(i, j));
    }
  }
  return R * bulk + grad / (2.0 * R);
}

}  // namespace

Field relax(const Field& field, const Potential& pot, double R, const RelaxOptions& opts,
            RelaxInfo* info) {
  Field f = field;
  const double h = f.spacing;
  const double lip = pot.grad_lipschitz();
  double tau = opts.step_safety * h * h * R * R / (4.0 + h * h * R * R * lip);

  const double tau_cap = tau;
  const bool dirichlet = f.bc == BcKind::dirichlet;
  std::vector<Vec2> next(f.values.size());
  Field checkpoint = f;
  double checkpoint_energy = edge_energy(f, pot, R);
  int good_checks = 0;

#ifdef _OPENMP
  if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

  double residual = 0.0;
  long it = 0;
  for (; it < opts.max_iter; ++it) {
    residual = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : residual) schedule(static)
#endif
    for (int j = 0; j < f.ny; ++j) {
      for (int i = 0; i < f.nx; ++i) {
        std::size_t id = f.idx(i, j);
        NodeKind k = f.mask[id];
        if (k == NodeKind::outside || (dirichlet && k == NodeKind::boundary)) {
          next[id] = f.values[id];
          continue;
        }
        Vec2 r = node_residual(f, pot, R, i, j);
        residual = std::max(residual, std::max(std::abs(r.x), std::abs(r.y)));
        next[id] = f.values[id] + r * tau;
      }
    }
    f.values.swap(next);

    if (residual <= opts.tol) {
      ++it;
      break;
    }
    if ((it + 1) % opts.energy_check_every == 0) {
      double e = edge_energy(f, pot, R);
      if (e > checkpoint_energy + 1e-12 * std::max(1.0, std::abs(checkpoint_energy))) {
        // explicit step overshot: revert and halve
        f = checkpoint;
        tau *= 0.5;
        good_checks = 0;
        if (tau < 1e-18)
          throw ConvergenceError("relax: step underflow", residual, it);
      } else {
        checkpoint = f;
        checkpoint_energy = e;
        // recover the step after sustained descent
        if (++good_checks >= 8 && tau < tau_cap) {
          tau = std::min(2.0 * tau, tau_cap);
          good_checks = 0;
        }
      }
    }
  }
  if (residual > opts.tol) {
    std::ostringstream msg;
    msg << "relax: residual " << residual << " above tol " << opts.tol << " after " << it
        << " sweeps";
    throw ConvergenceError(msg.str(), residual, it);
  }
  if (info) {
    info->iterations = it;
    info->residual = residual;
    info->final_energy = energy(f, pot, R);
    info->step = tau;
  }
  return f;
}

Field blowdown(const Field& field, double R_factor, const GridSpec& target) {
  if (R_factor <= 0.0) throw ValidationError("blowdown: R_factor must be positive");
  Field out = make_field(target, field.bc);
  double sx0 = field.origin.x, sx1 = field.origin.x + (field.nx - 1) * field.spacing;
  double sy0 = field.origin.y, sy1 = field.origin.y + (field.ny - 1) * field.spacing;
  const double tol = 1e-9 * field.spacing;
  for (int j = 0; j < out.ny; ++j)
    for (int i = 0; i < out.nx; ++i) {
      if (out.kind(i, j) == NodeKind::outside) continue;
      Vec2 x = out.pos(i, j) * R_factor;
      if (x.x < sx0 - tol || x.x > sx1 + tol || x.y < sy0 - tol || x.y > sy1 + tol)
        throw OutOfFootprintError("blowdown: target exceeds the source footprint");
      out.at(i, j) = field.sample(x);
    }
  return out;
}

Vec2 TraceData::at(double angle) const {
  if (theta.empty()) return {0.0, 0.0};
  double a = wrap_angle(angle);
  double step = 2.0 * pi() / theta.size();
  double fk = a / step;
  std::size_t k = static_cast<std::size_t>(fk) % theta.size();
  double w = fk - std::floor(fk);
  std::size_t k2 = (k + 1) % theta.size();
  return value[k] * (1.0 - w) + value[k2] * w;
}

double TraceData::boundary_energy(const Potential& pot) const {
  double ds = radius * 2.0 * pi() / theta.size();
  double e = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    std::size_t k2 = (k + 1) % theta.size();
    Vec2 dv = (value[k2] - value[k]) / ds;
    Vec2 mid = (value[k2] + value[k]) * 0.5;
    e += (R * pot.eval(mid) + norm_sq(dv) / (2.0 * R)) * ds;
  }
  return e;
}

TraceData build_trace(const BoundaryData& bdata, const Potential& pot, double R, double radius,
                      int resolution) {
  bdata.validate();
  if (R < 1.0) throw ValidationError("build_trace: R must be at least 1");

  TraceData trace;
  trace.R = R;
  trace.radius = radius;
  trace.theta.resize(resolution);
  trace.value.resize(resolution);

  auto jumps = bdata.jumps();
  // transition half-width in arclength: the profile is effectively converged
  // past ~10 linearization lengths
  double rate = std::sqrt(std::max(pot.hessian_floor, 1e-6));
  double T_need = std::min(12.0, 10.0 / rate + 2.0);
  double half_width = T_need / R;
  for (const auto& arc : bdata.arcs) {
    double len = (arc.end - arc.start) * radius;
    if (!jumps.empty() && len < 2.2 * half_width)
      throw ArcTooShortError("build_trace: arc shorter than its transition width");
  }

  // profiles per jump label pair, metric-translate pinned at W-max
  std::vector<HeteroclinicProfile> profiles;
  for (const auto& jump : jumps)
    profiles.push_back(heteroclinic(pot, jump.label_before, jump.label_after, 12.0, 1024));

  for (int k = 0; k < resolution; ++k) {
    double th = 2.0 * pi() * k / resolution;
    trace.theta[k] = th;
    if (jumps.empty()) {
      trace.value[k] = pot.wells[bdata.arcs.front().label];
      continue;
    }
    // nearest jump in arclength
    std::size_t best = 0;
    double best_ds = 1e300;
    for (std::size_t m = 0; m < jumps.size(); ++m) {
      double ds = std::abs(angle_diff(th, jumps[m].angle)) * radius;
      if (ds < best_ds) {
        best_ds = ds;
        best = m;
      }
    }
    double s = angle_diff(th, jumps[best].angle) * radius;
    trace.value[k] = profiles[best].at(R * s);
  }
  return trace;
}

void apply_trace(Field& field, const TraceData& trace) {
  if (field.domain != DomainShape::disc)
    throw ValidationError("apply_trace: traces apply to disc fields");
  Vec2 c = field.center();
  for (int j = 0; j < field.ny; ++j)
    for (int i = 0; i < field.nx; ++i) {
      if (field.kind(i, j) != NodeKind::boundary) continue;
      Vec2 d = field.pos(i, j) - c;
      field.at(i, j) = trace.at(std::atan2(d.y, d.x));
    }
  field.bc = BcKind::dirichlet;
}

RecoverySchedule RecoverySchedule::defaults(double R) {
  RecoverySchedule s;
  s.eta = std::pow(R, -2.0 / 3.0);
  s.lambda = std::pow(R, -1.0 / 8.0);
  s.rho = std::pow(R, -8.0 / 9.0);
  s.h = 0.8 * std::pow(R, -11.0 / 12.0);
  return s;
}

void RecoverySchedule::validate() const {
  if (eta <= 0.0 || lambda <= 0.0 || rho <= 0.0 || h <= 0.0)
    throw InvalidScheduleError("recovery schedule: parameters must be positive");
  if (2.0 * h > eta)
    throw InvalidScheduleError("recovery schedule: 2h <= eta violated");
  if (h >= eta * lambda * lambda)
    throw InvalidScheduleError("recovery schedule: h >= eta*lambda^2, strips would overlap");
  if (rho >= 0.5)
    throw InvalidScheduleError("recovery schedule: boundary layer too thick");
}

ProbeReport local_min_probe(const Field& field, const Potential& pot, double R, const Rect& K,
                            int trials, double amplitude, unsigned long long seed,
                            const RelaxOptions& opts) {
  // sub-grid covering K, snapped to the parent grid
  int i0 = std::max(0, static_cast<int>(std::ceil((K.lo.x - field.origin.x) / field.spacing)));
  int j0 = std::max(0, static_cast<int>(std::ceil((K.lo.y - field.origin.y) / field.spacing)));
  int i1 = std::min(field.nx - 1,
                    static_cast<int>(std::floor((K.hi.x - field.origin.x) / field.spacing)));
  int j1 = std::min(field.ny - 1,
                    static_cast<int>(std::floor((K.hi.y - field.origin.y) / field.spacing)));
  if (i1 - i0 < 8 || j1 - j0 < 8)
    throw ValidationError("local_min_probe: sub-rectangle too small for the grid");
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      if (field.kind(i, j) == NodeKind::outside)
        throw ValidationError("local_min_probe: K must lie inside the domain");

  GridSpec sub;
  sub.nx = i1 - i0 + 1;
  sub.ny = j1 - j0 + 1;
  sub.spacing = field.spacing;
  sub.origin = field.pos(i0, j0);
  sub.domain = DomainShape::rectangle;

  Field base = make_field(sub, BcKind::dirichlet);
  for (int j = 0; j < sub.ny; ++j)
    for (int i = 0; i < sub.nx; ++i) base.at(i, j) = field.at(i0 + i, j0 + j);

  ProbeReport rep;
  rep.area = (sub.nx - 1) * (sub.ny - 1) * sub.spacing * sub.spacing;
  rep.base_energy = energy(base, pot, R);
  rep.min_delta = 1e300;

  Vec2 lo = sub.origin;
  Vec2 hi = base.pos(sub.nx - 1, sub.ny - 1);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed + 7919ULL * (trial + 1));
    Field pert = base;
    // three smooth bumps, clamped ring untouched
    for (int b = 0; b < 3; ++b) {
      Vec2 c{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
      double w = rng.uniform(0.08, 0.25) * std::min(hi.x - lo.x, hi.y - lo.y);
      Vec2 amp{rng.uniform(-amplitude, amplitude), rng.uniform(-amplitude, amplitude)};
      for (int j = 1; j < sub.ny - 1; ++j)
        for (int i = 1; i < sub.nx - 1; ++i) {
          Vec2 x = pert.pos(i, j);
          double g = std::exp(-norm_sq(x - c) / (w * w));
          pert.at(i, j) += amp * g;
        }
    }
    Field rel = relax(pert, pot, R, opts);
    rep.deltas.push_back(energy(rel, pot, R) - rep.base_energy);
    rep.min_delta = std::min(rep.min_delta, rep.deltas.back());
  }
  return rep;
}

}  // namespace twac
