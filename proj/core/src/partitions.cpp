#include "twac/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "twac/errors.hpp"
#include "twac/rng.hpp"

namespace twac {

namespace {

Vec2 circle_point(double angle) { return {std::cos(angle), std::sin(angle)}; }

// ccw circle samples from angle a to angle b > a (unit circle), endpoints included
std::vector<Vec2> arc_samples(double a, double b, int per_radian = 24) {
  int n = std::max(2, static_cast<int>((b - a) * per_radian));
  std::vector<Vec2> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back(circle_point(a + (b - a) * k / n));
  return out;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % poly.size()];
    s += cross(a, b);
  }
  return 0.5 * s;
}

bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t k = 0, m = poly.size() - 1; k < poly.size(); m = k++) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[m];
    if (((a.y > p.y) != (b.y > p.y)) &&
        (p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x))
      in = !in;
  }
  return in;
}

double dist_to_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  double best = 1e300;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    Vec2 a = poly[k], b = poly[(k + 1) % poly.size()];
    Vec2 d = b - a;
    double len2 = norm_sq(d);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, dist(p, a + d * t));
  }
  return best;
}

// ---- derivative-free descent + Newton polish for weighted Fermat sums ----

// Nelder-Mead on R^dim, deterministic.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, double scale, int max_iter = 4000) {
  const std::size_t dim = x0.size();
  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t k = 0; k < dim; ++k) simplex[k + 1][k] += scale;
  std::vector<double> val(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) val[k] = f(simplex[k]);
  for (int it = 0; it < max_iter; ++it) {
    // order
    std::vector<std::size_t> idx(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) idx[k] = k;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (std::size_t k = 0; k <= dim; ++k) {
      s2.push_back(simplex[idx[k]]);
      v2.push_back(val[idx[k]]);
    }
    simplex = s2;
    val = v2;
    double spread = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t d = 0; d < dim; ++d)
        spread = std::max(spread, std::abs(simplex[k + 1][d] - simplex[0][d]));
    if (spread < 1e-13 && val[dim] - val[0] < 1e-15) break;
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[k][d] / dim;
    auto blend = [&](double t) {
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d) p[d] = centroid[d] + t * (centroid[d] - simplex[dim][d]);
      return p;
    };
    std::vector<double> xr = blend(1.0);
    double fr = f(xr);
    if (fr < val[0]) {
      std::vector<double> xe = blend(2.0);
      double fe = f(xe);
      if (fe < fr) {
        simplex[dim] = xe;
        val[dim] = fe;
      } else {
        simplex[dim] = xr;
        val[dim] = fr;
      }
    } else if (fr < val[dim - 1]) {
      simplex[dim] = xr;
      val[dim] = fr;
    } else {
      std::vector<double> xc = blend(-0.5);
      double fc = f(xc);
      if (fc < val[dim]) {
        simplex[dim] = xc;
        val[dim] = fc;
      } else {
        for (std::size_t k = 1; k <= dim; ++k) {
          for (std::size_t d = 0; d < dim; ++d)
            simplex[k][d] = 0.5 * (simplex[k][d] + simplex[0][d]);
          val[k] = f(simplex[k]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k <= dim; ++k)
    if (val[k] < val[best]) best = k;
  return simplex[best];
}

struct FermatTerm {
  Vec2 anchor;
  double weight;
};

// Newton polish for sum_m w_m |x - a_m| (strictly convex away from anchors).
Vec2 fermat_newton(Vec2 x, const std::vector<FermatTerm>& terms) {
  for (int it = 0; it < 100; ++it) {
    Vec2 g{0.0, 0.0};
    Mat2 h{0.0, 0.0, 0.0};
    for (const auto& t : terms) {
      Vec2 d = x - t.anchor;
      double r = norm(d);
      if (r < 1e-14) return x;  // sitting on an anchor: nonsmooth point
      Vec2 u = d / r;
      g += u * t.weight;
      double w = t.weight / r;
      h += Mat2{w * (1.0 - u.x * u.x), -w * u.x * u.y, w * (1.0 - u.y * u.y)};
    }
    double det = h.det();
    if (std::abs(det) < 1e-30) break;
    Vec2 step{(h.yy * g.x - h.xy * g.y) / det, (h.xx * g.y - h.xy * g.x) / det};
    x -= step;
    if (norm(step) < 1e-15) break;
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------- BoundaryData

int BoundaryData::label_at(double angle) const {
  double a = wrap_angle(angle);
  for (const auto& arc : arcs) {
    double s = wrap_angle(arc.start);
    double span = arc.end - arc.start;
    double off = wrap_angle(a - s);
    if (off < span - 1e-15 || span >= 2.0 * pi() - 1e-12) return arc.label;
  }
  return arcs.empty() ? -1 : arcs.front().label;
}

std::vector<BoundaryData::Jump> BoundaryData::jumps() const {
  std::vector<Jump> out;
  if (arcs.size() < 2) return out;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& prev = arcs[(i + arcs.size() - 1) % arcs.size()];
    double a = wrap_angle(arcs[i].start);
    out.push_back({a, circle_point(a), prev.label, arcs[i].label});
  }
  return out;
}

void BoundaryData::validate() const {
  if (arcs.empty()) throw ValidationError("boundary data: no arcs");
  double total = 0.0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto& arc = arcs[i];
    if (arc.label < 0 || arc.label > 2)
      throw ValidationError("boundary data: labels must be in {0,1,2}");
    double span = arc.end - arc.start;
    if (span <= 0.0 || span > 2.0 * pi() + 1e-12)
      throw ValidationError("boundary data: arc spans must be positive and at most 2 pi");
    total += span;
    const auto& next = arcs[(i + 1) % arcs.size()];
    if (std::abs(wrap_angle(arc.end) - wrap_angle(next.start)) > 1e-9 &&
        std::abs(wrap_angle(arc.end) - wrap_angle(next.start) - 2.0 * pi()) > 1e-9 &&
        std::abs(wrap_angle(next.start) - wrap_angle(arc.end) - 2.0 * pi()) > 1e-9)
      throw ValidationError("boundary data: arcs must be contiguous");
    if (arcs.size() > 1 && arc.label == next.label)
      throw ValidationError("boundary data: adjacent arcs must carry different labels");
  }
  if (std::abs(total - 2.0 * pi()) > 1e-9)
    throw ValidationError("boundary data: arcs must cover the circle");
  if (k() > max_k) throw ValidationError("boundary data: too many discontinuities");
}

BoundaryData BoundaryData::rotated(double angle) const {
  BoundaryData out = *this;
  for (auto& arc : out.arcs) {
    arc.start += angle;
    arc.end += angle;
  }
  return out;
}

BoundaryData BoundaryData::three_arcs(double a0, double a1, double a2) {
  BoundaryData b;
  while (a1 < a0) a1 += 2.0 * pi();
  while (a2 < a1) a2 += 2.0 * pi();
  b.arcs = {{a0, a1, 0}, {a1, a2, 1}, {a2, a0 + 2.0 * pi(), 2}};
  b.validate();
  return b;
}

BoundaryData BoundaryData::two_arcs(double a0, double a1, int label_first, int label_second) {
  BoundaryData b;
  while (a1 < a0) a1 += 2.0 * pi();
  b.arcs = {{a0, a1, label_first}, {a1, a0 + 2.0 * pi(), label_second}};
  b.validate();
  return b;
}

BoundaryData BoundaryData::single(int label) {
  BoundaryData b;
  b.arcs = {{0.0, 2.0 * pi(), label}};
  b.validate();
  return b;
}

// ------------------------------------------------------------ PartitionNetwork

int PartitionNetwork::label_at(Vec2 x) const {
  for (const auto& f : faces)
    if (point_in_polygon(f.polygon, x)) return f.label;
  // interface / boundary fallback: nearest face
  double best = 1e300;
  int label = faces.empty() ? -1 : faces.front().label;
  for (const auto& f : faces) {
    double d = dist_to_polygon(f.polygon, x);
    if (d < best) {
      best = d;
      label = f.label;
    }
  }
  return label;
}

Vec2 GrayArc::point_at(double s) const {
  double a = angle_start + sweep * s;
  return center + Vec2{std::cos(a), std::sin(a)} * radius;
}

// ------------------------------------------------------------ perimeter energy

double perimeter_energy(const PartitionNetwork& network, const SurfaceTensions& tensions) {
  double e = 0.0;
  for (const auto& s : network.segments) {
    if (s.label_left == s.label_right || s.label_left < 0 || s.label_right < 0 ||
        s.label_left > 2 || s.label_right > 2)
      throw ValidationError("perimeter_energy: inconsistent segment labeling");
    e += tensions.cost(s.label_left, s.label_right) * s.length();
  }
  return e;
}

double perimeter_energy(const WettedNetwork& network, const SurfaceTensions& tensions) {
  double e = 0.0;
  for (const auto& s : network.segments) {
    if (s.label_left == s.label_right)
      throw ValidationError("perimeter_energy: inconsistent segment labeling");
    e += tensions.cost(s.label_left, s.label_right) * s.length();
  }
  for (const auto& a : network.arcs) e += tensions.tension(a.label) * a.length();
  return e;
}

// --------------------------------------------------------------- solve_problem1

namespace {

struct Topology {
  double cost = 1e300;
  std::vector<Vec2> junctions;
  std::vector<NetworkSegment> segments;
  std::vector<NetworkFace> faces;
};

NetworkFace lens_face(const BoundaryData::Jump& ja, const BoundaryData::Jump& jb, int label) {
  // face bounded by the ccw circle arc from ja to jb and the chord back
  double a = ja.angle, b = jb.angle;
  while (b < a) b += 2.0 * pi();
  NetworkFace f;
  f.label = label;
  f.polygon = arc_samples(a, b);
  return f;
}

Topology chord_topology(const std::vector<BoundaryData::Jump>& q, const SurfaceTensions& t) {
  // two arcs: single chord between the two jumps
  Topology topo;
  int li = q[0].label_after;  // arc 0 runs from q0 to q1
  int lo = q[1].label_after;
  topo.segments = {{q[0].point, q[1].point, li, lo}};
  topo.cost = t.cost(li, lo) * dist(q[0].point, q[1].point);
  topo.faces = {lens_face(q[0], q[1], li), lens_face(q[1], q[0], lo)};
  return topo;
}

Topology star_topology(const std::vector<BoundaryData::Jump>& q, const SurfaceTensions& t) {
  std::vector<FermatTerm> terms;
  for (const auto& jump : q)
    terms.push_back({jump.point, t.cost(jump.label_before, jump.label_after)});
  auto cost_of = [&](Vec2 x) {
    double c = 0.0;
    for (const auto& term : terms) c += term.weight * dist(x, term.anchor);
    return c;
  };
  Vec2 centroid{0.0, 0.0};
  for (const auto& jump : q) centroid += jump.point;
  centroid = centroid / static_cast<double>(q.size());
  std::vector<double> best = nelder_mead(
      [&](const std::vector<double>& v) {
        Vec2 x{v[0], v[1]};
        if (norm(x) > 1.0) return cost_of(x) + 10.0 * (norm(x) - 1.0);
        return cost_of(x);
      },
      {centroid.x, centroid.y}, 0.2);
  Vec2 x = fermat_newton({best[0], best[1]}, terms);
  if (norm(x) > 1.0) x = x / norm(x);

  Topology topo;
  topo.junctions = {x};
  topo.cost = cost_of(x);
  for (std::size_t m = 0; m < q.size(); ++m) {
    topo.segments.push_back({x, q[m].point, q[m].label_before, q[m].label_after});
    const auto& next = q[(m + 1) % q.size()];
    double a = q[m].angle, b = next.angle;
    while (b < a) b += 2.0 * pi();
    NetworkFace f;
    f.label = q[m].label_after;
    f.polygon.push_back(x);
    auto samples = arc_samples(a, b);
    f.polygon.insert(f.polygon.end(), samples.begin(), samples.end());
    topo.faces.push_back(std::move(f));
  }
  return topo;
}

// four arcs, pairing (q[i0],q[i0+1]) and (q[i0+2],q[i0+3]): carve those two arcs
Topology two_chord_topology(const std::vector<BoundaryData::Jump>& q, const SurfaceTensions& t,
                            int i0) {
  auto J = [&](int m) -> const BoundaryData::Jump& { return q[(i0 + m) % 4]; };
  int carved1 = J(0).label_after;                   // arc between q[i0], q[i0+1]
  int carved2 = J(2).label_after;
  int mid1 = J(1).label_after;                      // the two remaining arcs
  int mid2 = J(3).label_after;
  if (mid1 != mid2) {
    Topology bad;
    return bad;  // middle face would mix two labels: invalid pairing
  }
  Topology topo;
  topo.segments = {{J(0).point, J(1).point, carved1, mid1},
                   {J(2).point, J(3).point, carved2, mid1}};
  topo.cost = t.cost(carved1, mid1) * dist(J(0).point, J(1).point) +
              t.cost(carved2, mid1) * dist(J(2).point, J(3).point);
  topo.faces.push_back(lens_face(J(0), J(1), carved1));
  topo.faces.push_back(lens_face(J(2), J(3), carved2));
  NetworkFace mid;
  mid.label = mid1;
  double a1 = J(1).angle, b1 = J(2).angle;
  while (b1 < a1) b1 += 2.0 * pi();
  auto s1 = arc_samples(a1, b1);
  double a2 = J(3).angle, b2 = J(0).angle;
  while (b2 < a2) b2 += 2.0 * pi();
  auto s2 = arc_samples(a2, b2);
  mid.polygon.insert(mid.polygon.end(), s1.begin(), s1.end());
  mid.polygon.insert(mid.polygon.end(), s2.begin(), s2.end());
  topo.faces.push_back(std::move(mid));
  return topo;
}

// four arcs with labels (L, A, L, B), A != B: tree with two interior junctions
// joined by a middle segment separating A from B. `shift` aligns the pattern.
Topology tree_topology(const std::vector<BoundaryData::Jump>& q, const SurfaceTensions& t,
                       int shift) {
  auto J = [&](int m) -> const BoundaryData::Jump& { return q[(shift + m) % 4]; };
  int L = J(0).label_after;   // arcs 0 and 2 carry L
  int A = J(1).label_after;
  int B = J(3).label_after;
  if (J(2).label_after != L || A == B) return {};

  // junction a joins faces (arc0:L, arc1:A, arc3:B) via q1, q0 hmm see below;
  // segments: q1 -> Ja (L|A), q0 -> Ja? indexing: jump m sits between arcs m-1, m.
  // Jump J(1) separates arc0 (L) and arc1 (A); J(2): arc1|arc2 = A|L;
  // J(3): arc2|arc3 = L|B; J(0): arc3|arc0 = B|L.
  // Tree: Ja meets (arc0-face L, A-face, B-face): segments J(1)->Ja, J(0)->Ja.
  //       Jb meets (arc2-face L, A-face, B-face): segments J(2)->Jb, J(3)->Jb.
  //       middle Ja-Jb separates A|B.
  double cLA = t.cost(L, A), cLB = t.cost(L, B), cAB = t.cost(A, B);
  auto cost_of = [&](Vec2 a, Vec2 b) {
    return cLA * dist(a, J(1).point) + cLB * dist(a, J(0).point) + cLA * dist(b, J(2).point) +
           cLB * dist(b, J(3).point) + cAB * dist(a, b);
  };
  Vec2 ca = (J(0).point + J(1).point) * 0.5;
  Vec2 cb = (J(2).point + J(3).point) * 0.5;
  std::vector<double> best = nelder_mead(
      [&](const std::vector<double>& v) {
        Vec2 a{v[0], v[1]}, b{v[2], v[3]};
        double pen = 0.0;
        if (norm(a) > 1.0) pen += 10.0 * (norm(a) - 1.0);
        if (norm(b) > 1.0) pen += 10.0 * (norm(b) - 1.0);
        return cost_of(a, b) + pen;
      },
      {ca.x, ca.y, cb.x, cb.y}, 0.2);
  Vec2 a{best[0], best[1]}, b{best[2], best[3]};
  // alternating per-junction Newton (each is a 3-term Fermat problem)
  for (int it = 0; it < 60; ++it) {
    Vec2 a2 = fermat_newton(a, {{J(1).point, cLA}, {J(0).point, cLB}, {b, cAB}});
    Vec2 b2 = fermat_newton(b, {{J(2).point, cLA}, {J(3).point, cLB}, {a2, cAB}});
    if (dist(a, a2) + dist(b, b2) < 1e-15) {
      a = a2;
      b = b2;
      break;
    }
    a = a2;
    b = b2;
  }
  if (norm(a) > 1.0 || norm(b) > 1.0 || dist(a, b) < 1e-9) return {};

  Topology topo;
  topo.junctions = {a, b};
  topo.cost = cost_of(a, b);
  topo.segments = {{a, J(1).point, L, A},
                   {a, J(0).point, B, L},
                   {b, J(2).point, A, L},
                   {b, J(3).point, L, B},
                   {a, b, A, B}};
  // faces: arc0 (L): [Ja, q1, arc, ... wait arc0 runs q... build from jumps
  auto face_arc = [&](int m, std::vector<Vec2> tail) {
    NetworkFace f;
    f.label = J(m).label_after;
    double s = J(m).angle, e = J(m + 1).angle;
    while (e < s) e += 2.0 * pi();
    f.polygon = arc_samples(s, e);
    f.polygon.insert(f.polygon.end(), tail.begin(), tail.end());
    return f;
  };
  topo.faces.push_back(face_arc(0, {a}));        // L-face at arc0: q0 -> q1 -> Ja
  topo.faces.push_back(face_arc(1, {b, a}));     // A-face: q1 -> q2 -> Jb -> Ja
  topo.faces.push_back(face_arc(2, {b}));        // L-face at arc2: q2 -> q3 -> Jb
  topo.faces.push_back(face_arc(3, {a, b}));     // B-face: q3 -> q0 -> Ja -> Jb
  return topo;
}

}  // namespace

PartitionNetwork solve_problem1(const BoundaryData& bdata, const SurfaceTensions& tensions) {
  bdata.validate();
  auto q = bdata.jumps();
  const int k = bdata.k();
  if (k > 4)
    throw UnsupportedTopologyError("solve_problem1: k = " + std::to_string(k) +
                                   " exceeds the supported topology range (k <= 4)");

  PartitionNetwork net;
  if (k == 0) {
    NetworkFace f;
    f.label = bdata.arcs.front().label;
    f.polygon = arc_samples(0.0, 2.0 * pi());
    net.faces = {std::move(f)};
    net.cost = 0.0;
    return net;
  }

  std::vector<Topology> candidates;
  if (k == 2) {
    candidates.push_back(chord_topology(q, tensions));
  } else if (k == 3) {
    candidates.push_back(star_topology(q, tensions));
  } else {  // k == 4
    candidates.push_back(two_chord_topology(q, tensions, 0));
    candidates.push_back(two_chord_topology(q, tensions, 1));
    candidates.push_back(star_topology(q, tensions));
    for (int shift = 0; shift < 2; ++shift) candidates.push_back(tree_topology(q, tensions, shift));
  }

  const Topology* best = nullptr;
  for (const auto& c : candidates)
    if (!c.faces.empty() && (best == nullptr || c.cost < best->cost)) best = &c;
  if (!best) throw UnsupportedTopologyError("solve_problem1: no admissible topology found");

  net.junctions = best->junctions;
  net.segments = best->segments;
  net.faces = best->faces;
  net.cost = best->cost;
  return net;
}

double junction_angle_residual(const PartitionNetwork& network, const SurfaceTensions& tensions) {
  double worst = 0.0;
  for (const Vec2& J : network.junctions) {
    // incident segment directions sorted ccw
    std::vector<std::pair<double, Vec2>> dirs;
    for (const auto& s : network.segments) {
      Vec2 far{};
      if (dist(s.a, J) < 1e-9)
        far = s.b;
      else if (dist(s.b, J) < 1e-9)
        far = s.a;
      else
        continue;
      Vec2 d = normalized(far - J);
      dirs.push_back({wrap_angle(std::atan2(d.y, d.x)), d});
    }
    if (dirs.size() != 3) continue;
    std::sort(dirs.begin(), dirs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    // sector labels and opening angles
    for (int m = 0; m < 3; ++m) {
      double a0 = dirs[m].first;
      double a1 = dirs[(m + 1) % 3].first;
      double alpha = wrap_angle(a1 - a0);
      // find the phase occupying this sector
      Vec2 probe = J + rotate(Vec2{1.0, 0.0}, a0 + 0.5 * alpha) * 1e-3;
      int label = network.label_at(probe);
      // sine law: the sector of phase l opens with angle alpha_l
      auto angles = junction_angles(tensions.c12, tensions.c13, tensions.c23);
      worst = std::max(worst, std::abs(alpha - angles[label]));
    }
  }
  return worst;
}

// ---------------------------------------------------------- multiway_cut_oracle

namespace {

struct PixelGrid {
  int n;
  double h;
  std::vector<signed char> lab;  // -1 outside band, else 0..2
  std::vector<unsigned char> inside;
  double x0;
  signed char& at(int i, int j) { return lab[static_cast<std::size_t>(i) * n + j]; }
  signed char get(int i, int j) const {
    if (i < 0 || j < 0 || i >= n || j >= n) return -1;
    return lab[static_cast<std::size_t>(i) * n + j];
  }
  bool is_inside(int i, int j) const { return inside[static_cast<std::size_t>(i) * n + j] != 0; }
  Vec2 center(int i, int j) const { return {x0 + (i + 0.5) * h, x0 + (j + 0.5) * h}; }
};

// 16-neighborhood cut metric (axis, diagonal, knight offsets). The weights
// are fitted so the directional response of a straight cut stays within 1.4%
// of the true length in every direction (plain 8-neighborhood Crofton
// weights are off by up to 4% along lattice directions).
constexpr int kCutOffsets[8][2] = {{1, 0}, {0, 1}, {1, 1},  {1, -1},
                                   {2, 1}, {1, 2}, {2, -1}, {1, -2}};
constexpr double kCutWeightAxis = 0.23242419;
constexpr double kCutWeightDiag = 0.06404738;
constexpr double kCutWeightKnight = 0.10432934;

inline double cut_weight(int o, double h) {
  return h * (o < 2 ? kCutWeightAxis : (o < 4 ? kCutWeightDiag : kCutWeightKnight));
}

double cut_cost(const PixelGrid& g, const double C[3][3]) {
  double tot = 0.0;
  for (int o = 0; o < 8; ++o) {
    double w = cut_weight(o, g.h);
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) {
        int i2 = i + kCutOffsets[o][0], j2 = j + kCutOffsets[o][1];
        signed char a = g.get(i, j), b = g.get(i2, j2);
        if (a < 0 || b < 0 || a == b) continue;
        bool in_a = g.is_inside(i, j);
        bool in_b = (i2 >= 0 && j2 >= 0 && i2 < g.n && j2 < g.n) && g.is_inside(i2, j2);
        if (in_a || in_b) tot += w * C[a][b];
      }
    }
  }
  return tot;
}

// sequential ICM sweeps until no pixel flips; direction alternates per sweep
void icm(PixelGrid& g, const double C[3][3], int max_sweeps = 800) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    long flips = 0;
    bool forward = (sweep % 2 == 0);
    for (int ii = 0; ii < g.n; ++ii) {
      int i = forward ? ii : g.n - 1 - ii;
      for (int jj = 0; jj < g.n; ++jj) {
        int j = forward ? jj : g.n - 1 - jj;
        if (!g.is_inside(i, j)) continue;
        double cost[3] = {0.0, 0.0, 0.0};
        for (int o = 0; o < 8; ++o) {
          double w = cut_weight(o, g.h);
          for (int sgn : {1, -1}) {
            signed char nb = g.get(i + sgn * kCutOffsets[o][0], j + sgn * kCutOffsets[o][1]);
            if (nb < 0) continue;
            for (int l = 0; l < 3; ++l) cost[l] += w * C[l][nb];
          }
        }
        signed char cur = g.at(i, j);
        signed char best = cur;
        for (signed char l = 0; l < 3; ++l)
          if (cost[l] < cost[best] - 1e-15) best = l;
        if (best != cur) {
          g.at(i, j) = best;
          ++flips;
        }
      }
    }
    if (flips == 0) break;
  }
}

}  // namespace

double multiway_cut_oracle(const BoundaryData& bdata, const SurfaceTensions& tensions, int n,
                           unsigned long long seed) {
  bdata.validate();
  if (n < 64) throw ValidationError("multiway_cut_oracle: need n >= 64");
  if (bdata.k() == 0) return 0.0;

  double C[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) C[i][j] = tensions.cost(i, j);

  PixelGrid g;
  g.n = n;
  double extent = 1.0 + 8.0 * (2.2 / n);
  g.h = 2.0 * extent / n;
  g.x0 = -extent;
  g.lab.assign(static_cast<std::size_t>(n) * n, -1);
  g.inside.assign(static_cast<std::size_t>(n) * n, 0);
  double band = 1.0 + 5.0 * g.h;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 p = g.center(i, j);
      double r = norm(p);
      if (r > band) continue;
      if (r <= 1.0) g.inside[static_cast<std::size_t>(i) * n + j] = 1;
    }

  // wedge initialization anchored at x0: label by the boundary arc of the
  // ray through the pixel. Anchors come from the Fermat objective over the
  // discontinuity points (best few over a coarse disc grid), plus the center.
  auto q = bdata.jumps();
  auto fermat = [&](Vec2 x) {
    double s = 0.0;
    for (const auto& jump : q) s += C[jump.label_before][jump.label_after] * dist(x, jump.point);
    return s;
  };
  std::vector<Vec2> anchors = {{0.0, 0.0}};
  {
    std::vector<std::pair<double, Vec2>> scored;
    const int m = 33;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Vec2 x{-0.95 + 1.9 * i / (m - 1), -0.95 + 1.9 * j / (m - 1)};
        if (norm(x) > 0.95) continue;
        scored.push_back({fermat(x), x});
      }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Rng rng(seed);
    for (const auto& [val, x] : scored) {
      bool close = false;
      for (const Vec2& a : anchors)
        if (dist(a, x) < 0.2) close = true;
      if (close) continue;
      Vec2 jittered = x + Vec2{rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01)};
      anchors.push_back(jittered);
      if (anchors.size() >= 6) break;
    }
  }

  // wedge init: the label of the boundary point hit by the ray from the
  // anchor through the pixel (for an anchor on a chord this reproduces the
  // chord partition exactly)
  auto hit_angle = [](Vec2 anchor, Vec2 p) {
    Vec2 d = normalized(p - anchor);
    double b = dot(anchor, d);
    double t = -b + std::sqrt(std::max(b * b - norm_sq(anchor) + 1.0, 0.0));
    Vec2 hit = anchor + d * t;
    return std::atan2(hit.y, hit.x);
  };
  auto run_wedge = [&](Vec2 anchor) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec2 p = g.center(i, j);
        if (norm(p) > band) continue;
        double theta = norm(p) > 1.0 || dist(p, anchor) < 1e-12
                           ? std::atan2(p.y, p.x)
                           : hit_angle(anchor, p);
        g.at(i, j) = static_cast<signed char>(bdata.label_at(theta));
      }
    icm(g, C);
    return cut_cost(g, C);
  };

  double best = 1e300;
  for (const Vec2& anchor : anchors) best = std::min(best, run_wedge(anchor));

  // lens-type inits for four arcs: carve two opposite arcs with chords;
  // wedges cannot produce this topology class
  if (q.size() == 4) {
    for (int i0 = 0; i0 < 2; ++i0) {
      int mid1 = q[(i0 + 1) % 4].label_after;
      int mid2 = q[(i0 + 3) % 4].label_after;
      if (mid1 != mid2) continue;
      Vec2 a1 = q[i0].point, b1 = q[(i0 + 1) % 4].point;
      Vec2 a2 = q[(i0 + 2) % 4].point, b2 = q[(i0 + 3) % 4].point;
      int lens1 = q[i0].label_after, lens2 = q[(i0 + 2) % 4].label_after;
      // lens side: the carved arc midpoint sits on the positive side
      auto side = [](Vec2 a, Vec2 b, Vec2 p) { return cross(b - a, p - a) > 0.0; };
      double am1 = q[i0].angle, bm1 = q[(i0 + 1) % 4].angle;
      while (bm1 < am1) bm1 += 2.0 * pi();
      Vec2 m1 = circle_point(0.5 * (am1 + bm1));
      double am2 = q[(i0 + 2) % 4].angle, bm2 = q[(i0 + 3) % 4].angle;
      while (bm2 < am2) bm2 += 2.0 * pi();
      Vec2 m2 = circle_point(0.5 * (am2 + bm2));
      bool s1 = side(a1, b1, m1), s2 = side(a2, b2, m2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Vec2 p = g.center(i, j);
          if (norm(p) > band) continue;
          if (norm(p) > 1.0) {
            g.at(i, j) = static_cast<signed char>(bdata.label_at(std::atan2(p.y, p.x)));
          } else if (side(a1, b1, p) == s1) {
            g.at(i, j) = static_cast<signed char>(lens1);
          } else if (side(a2, b2, p) == s2) {
            g.at(i, j) = static_cast<signed char>(lens2);
          } else {
            g.at(i, j) = static_cast<signed char>(mid1);
          }
        }
      icm(g, C);
      best = std::min(best, cut_cost(g, C));
    }
  }
  return best;
}

// --------------------------------------------------------------- solve_problem2

WettedNetwork solve_problem2(const BoundaryData& bdata, const SurfaceTensions& tensions,
                             double delta) {
  if (delta < 0.0) throw ValidationError("solve_problem2: delta must be nonnegative");
  PartitionNetwork net = solve_problem1(bdata, tensions);

  WettedNetwork wet;
  wet.junctions = net.junctions;
  wet.segments = net.segments;
  wet.faces = net.faces;
  wet.cost = net.cost;
  wet.delta = delta;
  wet.gray_area = 0.0;

  if (delta == 0.0 || net.junctions.empty()) return wet;

  // per-junction wetting data
  struct JData {
    Vec2 J;
    std::vector<int> segs;            // incident segment indices, ccw by direction
    std::vector<Vec2> dirs;
    std::vector<double> allowed;
    std::vector<int> labels;          // chamber label between dirs m, m+1
    std::vector<double> theta;        // pi - alpha per chamber
    std::vector<double> tens;
    double area1 = 0.0, gap1 = 0.0;
    double d = 0.0;
  };
  std::vector<JData> jdata;

  for (std::size_t jn = 0; jn < net.junctions.size(); ++jn) {
    JData jd;
    jd.J = net.junctions[jn];
    struct Inc {
      double angle;
      int idx;
      Vec2 dir;
      double allowed;
    };
    std::vector<Inc> inc;
    for (std::size_t s = 0; s < net.segments.size(); ++s) {
      const auto& seg = net.segments[s];
      Vec2 far;
      bool at_a = dist(seg.a, jd.J) < 1e-9;
      bool at_b = dist(seg.b, jd.J) < 1e-9;
      if (!at_a && !at_b) continue;
      far = at_a ? seg.b : seg.a;
      bool other_is_junction = false;
      for (const Vec2& other : net.junctions)
        if (dist(other, far) < 1e-9) other_is_junction = true;
      Vec2 d = normalized(far - jd.J);
      double allowed = (other_is_junction ? 0.45 : 0.9) * dist(far, jd.J);
      inc.push_back({wrap_angle(std::atan2(d.y, d.x)), static_cast<int>(s), d, allowed});
    }
    if (inc.size() != 3)
      throw UnsupportedTopologyError("solve_problem2: junction without exactly three interfaces");
    std::sort(inc.begin(), inc.end(), [](const Inc& a, const Inc& b) { return a.angle < b.angle; });
    for (const auto& e : inc) {
      jd.segs.push_back(e.idx);
      jd.dirs.push_back(e.dir);
      jd.allowed.push_back(e.allowed);
    }
    for (int m = 0; m < 3; ++m) {
      double a0 = inc[m].angle, a1 = inc[(m + 1) % 3].angle;
      double alpha = wrap_angle(a1 - a0);
      Vec2 probe = jd.J + rotate(Vec2{1.0, 0.0}, a0 + 0.5 * alpha) *
                              (0.15 * std::min({jd.allowed[0], jd.allowed[1], jd.allowed[2]}));
      int label = net.label_at(probe);
      jd.labels.push_back(label);
      jd.theta.push_back(pi() - alpha);
      jd.tens.push_back(tensions.tension(label));
    }
    // coefficients at unit cusp distance
    std::vector<Vec2> cusp1;
    for (int m = 0; m < 3; ++m) cusp1.push_back(jd.J + jd.dirs[m]);
    double tri = std::abs(polygon_area(cusp1));
    double segs_area = 0.0, arc_cost = 0.0, seg_cost = 0.0;
    for (int m = 0; m < 3; ++m) {
      double th = jd.theta[m];
      double r1 = 1.0 / std::tan(0.5 * th);  // radius at d = 1
      segs_area += 0.5 * r1 * r1 * (th - std::sin(th));
      arc_cost += jd.tens[m] * r1 * th;
    }
    for (int m = 0; m < 3; ++m) {
      const auto& seg = net.segments[jd.segs[m]];
      seg_cost += tensions.cost(seg.label_left, seg.label_right);
    }
    jd.area1 = tri - segs_area;
    jd.gap1 = seg_cost - arc_cost;
    if (jd.area1 <= 0.0 || jd.gap1 <= 0.0)
      throw ValidationError("solve_problem2: degenerate wetting geometry at a junction");
    jdata.push_back(std::move(jd));
  }

  // distribute delta to equalize marginal cost: delta_j proportional to
  // gap1^2 / area1 (marginal gain = gap1 / (2 sqrt(area1 delta_j)))
  double wsum = 0.0;
  for (const auto& jd : jdata) wsum += jd.gap1 * jd.gap1 / jd.area1;
  std::vector<double> deltas;
  for (const auto& jd : jdata) deltas.push_back(delta * (jd.gap1 * jd.gap1 / jd.area1) / wsum);

  // per-junction cusp distance by bisection on the curvature scale
  // (area(d) = area1 d^2 is exact; bisection keeps the construction honest
  // against the closed-form area formulas)
  for (std::size_t k = 0; k < jdata.size(); ++k) {
    JData& jd = jdata[k];
    double target = deltas[k];
    double dmax = std::min({jd.allowed[0], jd.allowed[1], jd.allowed[2]});
    auto area_of = [&](double d) { return jd.area1 * d * d; };
    if (area_of(dmax) < target)
      throw DeltaTooLargeError("solve_problem2: delta too large for the junction geometry");
    double lo = 0.0, hi = dmax;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (area_of(mid) < target ? lo : hi) = mid;
    }
    jd.d = 0.5 * (lo + hi);
  }

  // build the wetted geometry
  wet.curvature = {0.0, 0.0, 0.0};
  for (const auto& jd : jdata) {
    std::vector<Vec2> cusps;
    for (int m = 0; m < 3; ++m) cusps.push_back(jd.J + jd.dirs[m] * jd.d);
    // trim incident segments
    for (int m = 0; m < 3; ++m) {
      NetworkSegment& seg = wet.segments[jd.segs[m]];
      if (dist(seg.a, jd.J) < 1e-9)
        seg.a = cusps[m];
      else
        seg.b = cusps[m];
    }
    for (int m = 0; m < 3; ++m) {
      double th = jd.theta[m];
      double r = jd.d / std::tan(0.5 * th);
      double alpha = pi() - th;
      // center on the chamber bisector
      double a0 = std::atan2(jd.dirs[m].y, jd.dirs[m].x);
      Vec2 bis = rotate(Vec2{1.0, 0.0}, a0 + 0.5 * alpha);
      Vec2 C = jd.J + bis * (r / std::sin(0.5 * alpha));
      Vec2 ca = cusps[m], cb = cusps[(m + 1) % 3];
      double s0 = std::atan2(ca.y - C.y, ca.x - C.x);
      double s1 = std::atan2(cb.y - C.y, cb.x - C.x);
      double sweep = wrap_angle(s1 - s0);
      GrayArc arc;
      arc.center = C;
      arc.radius = r;
      arc.label = jd.labels[m];
      if (sweep <= pi()) {
        arc.angle_start = s0;
        arc.sweep = sweep;
      } else {
        arc.angle_start = s1;
        arc.sweep = 2.0 * pi() - sweep;
      }
      // the tangent arc must stay inside the disc
      for (int s = 0; s <= 8; ++s)
        if (norm(arc.point_at(s / 8.0)) > 1.0 + 1e-9)
          throw DeltaTooLargeError("solve_problem2: wetting arc exits the disc");
      wet.arcs.push_back(arc);
      wet.curvature[jd.labels[m]] = 1.0 / r;
      wet.cusps.push_back(cusps[m]);
    }
    wet.gray_area += jd.area1 * jd.d * jd.d;
    wet.cost -= jd.gap1 * jd.d;

    // trim the face polygons at this junction: replace the junction vertex by
    // cusp -> arc samples -> cusp
    for (auto& face : wet.faces) {
      for (std::size_t v = 0; v < face.polygon.size(); ++v) {
        if (dist(face.polygon[v], jd.J) > 1e-9) continue;
        // find this face's chamber at the junction
        int m = -1;
        for (int c = 0; c < 3; ++c)
          if (jd.labels[c] == face.label) m = c;
        if (m < 0) break;
        const GrayArc& arc = wet.arcs[wet.arcs.size() - 3 + m];
        std::vector<Vec2> repl;
        Vec2 ca = cusps[m], cb = cusps[(m + 1) % 3];
        // orient the replacement ccw inside the face: previous polygon vertex
        // is along one incident segment
        Vec2 prev = face.polygon[(v + face.polygon.size() - 1) % face.polygon.size()];
        bool start_at_b = dist(prev, cb) < dist(prev, ca);
        const int ns = 16;
        for (int s = 0; s <= ns; ++s) {
          double tpar = static_cast<double>(s) / ns;
          repl.push_back(arc.point_at(start_at_b ? 1.0 - tpar : tpar));
        }
        // make sure the replacement starts near the incoming edge
        if (dist(repl.front(), prev) > dist(repl.back(), prev))
          std::reverse(repl.begin(), repl.end());
        face.polygon.erase(face.polygon.begin() + v);
        face.polygon.insert(face.polygon.begin() + v, repl.begin(), repl.end());
        break;
      }
    }
  }
  return wet;
}

ComparisonTable compare_partitions(const BoundaryData& bdata, const SurfaceTensions& tensions,
                                   std::vector<double> deltas) {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] <= 0.0) throw ValidationError("compare_partitions: deltas must be positive");
    if (k > 0 && deltas[k] <= deltas[k - 1])
      throw ValidationError("compare_partitions: deltas must be strictly increasing");
  }
  PartitionNetwork net = solve_problem1(bdata, tensions);
  ComparisonTable table;
  table.monotone = true;
  double prev_cost = net.cost;
  for (double d : deltas) {
    WettedNetwork wet = solve_problem2(bdata, tensions, d);
    ComparisonRow row;
    row.delta = d;
    row.m0 = net.cost;
    row.m0_delta = wet.cost;
    row.gap = net.cost - wet.cost;
    row.gap_over_sqrt_delta = row.gap / std::sqrt(d);
    if (wet.cost > net.cost + 1e-12 || wet.cost > prev_cost + 1e-12) table.monotone = false;
    prev_cost = wet.cost;
    table.rows.push_back(row);
    table.gamma_estimate = std::max(table.gamma_estimate, row.gap_over_sqrt_delta);
  }
  // least-squares exponent of gap vs delta
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (const auto& row : table.rows) {
    if (row.gap <= 0.0) continue;
    double x = std::log(row.delta), y = std::log(row.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) table.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return table;
}

// ----------------------------------------------------------------- export

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "delta,m0,m0_delta,gap,gap_over_sqrt_delta,fitted_exponent,gamma_estimate\n";
  for (const auto& r : rows)
    out << format_double(r.delta) << ',' << format_double(r.m0) << ',' << format_double(r.m0_delta)
        << ',' << format_double(r.gap) << ',' << format_double(r.gap_over_sqrt_delta) << ','
        << format_double(fitted_exponent) << ',' << format_double(gamma_estimate) << '\n';
  return out.str();
}

namespace {

void export_segments(Config& cfg, const std::string& section,
                     const std::vector<NetworkSegment>& segments) {
  cfg.set_int(section, "segments", static_cast<long>(segments.size()));
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    cfg.set(section, "segment" + std::to_string(s + 1),
            format_double(seg.a.x) + " " + format_double(seg.a.y) + " " + format_double(seg.b.x) +
                " " + format_double(seg.b.y) + " " + std::to_string(seg.label_left) + " " +
                std::to_string(seg.label_right));
  }
}

}  // namespace

Config PartitionNetwork::to_config() const {
  Config cfg;
  const std::string s = "network";
  cfg.set_int(s, "junctions", static_cast<long>(junctions.size()));
  for (std::size_t k = 0; k < junctions.size(); ++k)
    cfg.set(s, "junction" + std::to_string(k + 1),
            format_double(junctions[k].x) + " " + format_double(junctions[k].y));
  export_segments(cfg, s, segments);
  cfg.set_double(s, "cost", cost);
  return cfg;
}

Config WettedNetwork::to_config() const {
  Config cfg;
  const std::string s = "wetted_network";
  cfg.set_int(s, "junctions", static_cast<long>(junctions.size()));
  for (std::size_t k = 0; k < junctions.size(); ++k)
    cfg.set(s, "junction" + std::to_string(k + 1),
            format_double(junctions[k].x) + " " + format_double(junctions[k].y));
  export_segments(cfg, s, segments);
  cfg.set_int(s, "arcs", static_cast<long>(arcs.size()));
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& a = arcs[k];
    cfg.set(s, "arc" + std::to_string(k + 1),
            format_double(a.center.x) + " " + format_double(a.center.y) + " " +
                format_double(a.radius) + " " + format_double(a.angle_start) + " " +
                format_double(a.sweep) + " " + std::to_string(a.label));
  }
  cfg.set_double(s, "gray_area", gray_area);
  cfg.set_double(s, "delta", delta);
  cfg.set_double(s, "cost", cost);
  for (int l = 0; l < 3; ++l)
    cfg.set_double(s, "kappa" + std::to_string(l + 1), curvature[l]);
  return cfg;
}

namespace {

std::string path_list(const std::vector<NetworkSegment>& segments,
                      const std::vector<GrayArc>* arcs) {
  std::ostringstream out;
  for (const auto& s : segments)
    out << "M " << format_double(s.a.x) << ' ' << format_double(s.a.y) << " L "
        << format_double(s.b.x) << ' ' << format_double(s.b.y) << '\n';
  if (arcs) {
    for (const auto& a : *arcs) {
      Vec2 p0 = a.point_at(0.0), p1 = a.point_at(1.0);
      out << "M " << format_double(p0.x) << ' ' << format_double(p0.y) << " A "
          << format_double(a.radius) << ' ' << format_double(a.radius) << " 0 0 1 "
          << format_double(p1.x) << ' ' << format_double(p1.y) << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string PartitionNetwork::to_path_list() const { return path_list(segments, nullptr); }
std::string WettedNetwork::to_path_list() const { return path_list(segments, &arcs); }

}  // namespace twac
