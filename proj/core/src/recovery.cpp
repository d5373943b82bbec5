#include <algorithm>
#include <cmath>
#include <vector>

#include "twac/errors.hpp"
#include "twac/solver.hpp"

namespace twac {

namespace {

// heteroclinic re-pinned so t = 0 sits at the metric midpoint: the point
// where the accumulated sqrt(2W)|zeta'| length reaches half of c_ij
double metric_midpoint_shift(const Potential& pot, const HeteroclinicProfile& prof) {
  double total = 0.0;
  std::vector<double> cum(prof.t.size(), 0.0);
  for (std::size_t k = 0; k + 1 < prof.t.size(); ++k) {
    Vec2 mid = (prof.value[k] + prof.value[k + 1]) * 0.5;
    total += pot.metric_weight(mid) * dist(prof.value[k], prof.value[k + 1]);
    cum[k + 1] = total;
  }
  double half = 0.5 * total;
  for (std::size_t k = 0; k + 1 < cum.size(); ++k) {
    if (cum[k + 1] >= half) {
      double w = (half - cum[k]) / std::max(cum[k + 1] - cum[k], 1e-300);
      return prof.t[k] + w * (prof.t[k + 1] - prof.t[k]);
    }
  }
  return 0.0;
}

struct Strip {
  Vec2 a, b;        // segment endpoints
  Vec2 axis;        // unit a -> b
  Vec2 normal;      // unit, pointing toward label_pos side
  double len = 0.0;
  int label_neg = 0;  // label on the -normal side
  int label_pos = 0;
  int profile_idx = 0;  // into the profile table
  bool oriented_neg_to_pos = true;  // profile runs label_neg -> label_pos
};

}  // namespace

Field recovery_field(const PartitionNetwork& u0, const TraceData& trace, const Potential& pot,
                     double R, const RecoverySchedule& sched, int grid_n) {
  sched.validate();
  if (R < 8.0) throw ValidationError("recovery_field: R too small for the schedule");

  // profiles for the three pairs, re-pinned at the metric midpoint
  struct PinnedProfile {
    HeteroclinicProfile prof;
    double shift = 0.0;
    Vec2 at(double t) const { return prof.at(t + shift); }
  };
  std::vector<PinnedProfile> profiles;   // index p(i,j) = i + j - 1 for i<j
  auto pair_index = [](int i, int j) { return std::min(i, j) + std::max(i, j) - 1; };
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    PinnedProfile pp;
    pp.prof = heteroclinic(pot, i, j, 12.0, 1024);
    pp.shift = metric_midpoint_shift(pot, pp.prof);
    profiles.push_back(std::move(pp));
  }

  // interface strips: only segments of length >= 2 eta get a profile strip
  std::vector<Strip> strips;
  for (const auto& seg : u0.segments) {
    if (seg.length() < 2.0 * sched.eta) continue;
    Strip s;
    s.a = seg.a;
    s.b = seg.b;
    s.len = seg.length();
    s.axis = (seg.b - seg.a) / s.len;
    s.normal = perp(s.axis);
    // which side does label_left occupy? probe at the midpoint
    Vec2 mid = (seg.a + seg.b) * 0.5;
    double probe_off = std::max(1.5 * sched.h, 3.0 / R);
    int side_pos = u0.label_at(mid + s.normal * probe_off);
    int side_neg = u0.label_at(mid - s.normal * probe_off);
    if (side_pos == side_neg) continue;  // degenerate probe; skip strip
    s.label_pos = side_pos;
    s.label_neg = side_neg;
    s.profile_idx = pair_index(side_neg, side_pos);
    s.oriented_neg_to_pos = side_neg < side_pos;  // profile runs min -> max label
    strips.push_back(s);
  }

  GridSpec spec = GridSpec::square(grid_n, 1.0, DomainShape::disc);
  Field f = make_field(spec, BcKind::dirichlet);
  const Vec2 center = f.center();

  auto strip_value = [&](Vec2 x, int label_here, bool* used) -> Vec2 {
    // nearest strip whose axis window contains x
    const Strip* best = nullptr;
    double best_d = 1e300;
    for (const auto& s : strips) {
      double along = dot(x - s.a, s.axis);
      if (along < -sched.h || along > s.len + sched.h) continue;
      double dperp = std::abs(dot(x - s.a, s.normal));
      if (dperp < best_d) {
        best_d = dperp;
        best = &s;
      }
    }
    *used = false;
    if (!best || best_d > sched.h) return {0.0, 0.0};
    *used = true;
    double signed_d = dot(x - best->a, best->normal);
    // the profile argument grows toward label_pos when oriented that way
    double t = R * signed_d;
    if (!best->oriented_neg_to_pos) t = -t;
    const PinnedProfile& pp = profiles[best->profile_idx];
    double half = 0.5 * sched.h * R;
    if (std::abs(t) <= half) return pp.at(t);
    // linear taper from the truncated profile value to the chamber well
    Vec2 edge = pp.at(t > 0 ? half : -half);
    Vec2 well = pot.wells[label_here];
    double frac = (std::abs(signed_d) - 0.5 * sched.h) / (0.5 * sched.h);
    frac = std::clamp(frac, 0.0, 1.0);
    return edge * (1.0 - frac) + well * frac;
  };

  auto inner_value = [&](Vec2 x) -> Vec2 {
    int label = u0.label_at(x);
    bool used = false;
    Vec2 v = strip_value(x, label, &used);
    if (used) return v;
    return pot.wells[label];
  };

  const double inner_r = 1.0 - sched.rho;
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      if (f.kind(i, j) == NodeKind::outside) continue;
      Vec2 x = f.pos(i, j) - center;
      double r = norm(x);
      if (r <= inner_r) {
        f.at(i, j) = inner_value(x);
      } else {
        Vec2 xin = r > 0.0 ? x * (inner_r / r) : x;
        double s = std::clamp((r - inner_r) / sched.rho, 0.0, 1.0);
        double th = std::atan2(x.y, x.x);
        f.at(i, j) = inner_value(xin) * (1.0 - s) + trace.at(th) * s;
      }
    }
  }
  return f;
}

}  // namespace twac
