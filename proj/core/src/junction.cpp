#include "twac/junction.hpp"

#include <cmath>
#include <string>

#include "twac/errors.hpp"

namespace twac {

double SurfaceTensions::tension(int l) const {
  switch (l) {
    case 0: return t1;
    case 1: return t2;
    case 2: return t3;
  }
  throw ValidationError("tension index out of range");
}

double SurfaceTensions::cost(int i, int j) const {
  return tension(i) + tension(j);
}

SurfaceTensions SurfaceTensions::from_tensions(double t1, double t2, double t3) {
  if (t1 <= 0.0 || t2 <= 0.0 || t3 <= 0.0)
    throw DegenerateTensionError("surface tensions must be positive");
  return {t1, t2, t3, t1 + t2, t1 + t3, t2 + t3};
}

SurfaceTensions surface_tensions(double c12, double c13, double c23) {
  if (c12 <= 0.0 || c13 <= 0.0 || c23 <= 0.0)
    throw ValidationError("surface_tensions: costs must be positive");
  SurfaceTensions t;
  t.c12 = c12;
  t.c13 = c13;
  t.c23 = c23;
  t.t1 = 0.5 * (c12 + c13 - c23);
  t.t2 = 0.5 * (c12 + c23 - c13);
  t.t3 = 0.5 * (c13 + c23 - c12);
  if (t.t1 <= 0.0 || t.t2 <= 0.0 || t.t3 <= 0.0)
    throw DegenerateTensionError("degenerate tension: triangle inequality fails (t = " +
                                 std::to_string(t.t1) + ", " + std::to_string(t.t2) + ", " +
                                 std::to_string(t.t3) + ")");
  return t;
}

std::array<double, 3> junction_angles(double c12, double c13, double c23) {
  surface_tensions(c12, c13, c23);  // validates strict triangle inequality

  // Closed form: alpha_l = pi - theta_l where theta_l are the angles of the
  // Euclidean triangle with sides (c23, c13, c12) opposite (theta1..theta3).
  double a = c23, b = c13, c = c12;
  auto tri_angle = [](double opp, double s1, double s2) {
    double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    return std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  std::array<double, 3> alpha = {pi() - tri_angle(a, b, c), pi() - tri_angle(b, a, c),
                                 pi() - tri_angle(c, a, b)};

  // Newton polish on the sine system with the sum constraint eliminated:
  // F1 = sin(a1)/c23 - sin(a2)/c13, F2 = sin(a2)/c13 - sin(2pi-a1-a2)/c12.
  for (int it = 0; it < 50; ++it) {
    double a1 = alpha[0], a2 = alpha[1];
    double a3 = 2.0 * pi() - a1 - a2;
    double f1 = std::sin(a1) / a - std::sin(a2) / b;
    double f2 = std::sin(a2) / b - std::sin(a3) / c;
    double j11 = std::cos(a1) / a, j12 = -std::cos(a2) / b;
    double j21 = std::cos(a3) / c, j22 = std::cos(a2) / b + std::cos(a3) / c;
    double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-30) break;
    double d1 = (f1 * j22 - f2 * j12) / det;
    double d2 = (j11 * f2 - j21 * f1) / det;
    alpha[0] -= d1;
    alpha[1] -= d2;
    if (std::abs(d1) + std::abs(d2) < 1e-15) break;
  }
  alpha[2] = 2.0 * pi() - alpha[0] - alpha[1];
  return alpha;
}

int JunctionMap::label_at(Vec2 x) const {
  Vec2 d = x - center;
  if (norm_sq(d) == 0.0) return labels[0];
  double th = wrap_angle(std::atan2(d.y, d.x));
  for (int k = 0; k < 3; ++k) {
    double off = wrap_angle(th - ray_angles[k]);
    if (off < opening_angles[k]) return labels[k];
  }
  // rounding at the wrap: the point sits on the closing ray
  return labels[2];
}

JunctionMap make_junction_map(const std::array<double, 3>& angles, double rotation,
                              const std::array<int, 3>& assignment, Vec2 center) {
  double sum = angles[0] + angles[1] + angles[2];
  if (std::abs(sum - 2.0 * pi()) > 1e-9)
    throw ValidationError("make_junction_map: opening angles must sum to 2 pi");
  bool seen[3] = {false, false, false};
  for (int l : assignment) {
    if (l < 0 || l > 2) throw ValidationError("make_junction_map: assignment must permute {0,1,2}");
    seen[l] = true;
  }
  if (!(seen[0] && seen[1] && seen[2]))
    throw ValidationError("make_junction_map: assignment must permute {0,1,2}");

  JunctionMap map;
  map.center = center;
  double start = wrap_angle(rotation);
  for (int k = 0; k < 3; ++k) {
    map.ray_angles[k] = start;
    map.opening_angles[k] = angles[k];
    map.labels[k] = assignment[k];
    start = wrap_angle(start + angles[k]);
  }
  return map;
}

Config JunctionMap::to_config() const {
  Config cfg;
  const std::string s = "junction_map";
  cfg.set(s, "center", format_double(center.x) + " " + format_double(center.y));
  for (int k = 0; k < 3; ++k) {
    cfg.set_double(s, "ray" + std::to_string(k + 1), ray_angles[k]);
    cfg.set_double(s, "alpha" + std::to_string(k + 1), opening_angles[k]);
    cfg.set_int(s, "label" + std::to_string(k + 1), labels[k]);
  }
  return cfg;
}

JunctionMap JunctionMap::from_config(const Config& cfg, const std::string& section) {
  JunctionMap map;
  std::vector<double> c = cfg.get_doubles(section, "center");
  if (c.size() != 2) throw ValidationError("junction_map: bad center");
  map.center = {c[0], c[1]};
  for (int k = 0; k < 3; ++k) {
    map.ray_angles[k] = cfg.get_double(section, "ray" + std::to_string(k + 1));
    map.opening_angles[k] = cfg.get_double(section, "alpha" + std::to_string(k + 1));
    map.labels[k] = static_cast<int>(cfg.get_int(section, "label" + std::to_string(k + 1)));
  }
  return map;
}

}  // namespace twac
