#pragma once

#include <cmath>

namespace twac {

/// Point / vector in the u-plane or the spatial plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

inline Vec2 rotate(Vec2 v, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Symmetric 2x2 matrix (Hessians, stress tensors).
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  constexpr Mat2 operator+(Mat2 o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  constexpr Mat2 operator-(Mat2 o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  constexpr Mat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
  Mat2& operator+=(Mat2 o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }

  constexpr double trace() const { return xx + yy; }
  constexpr double det() const { return xx * yy - xy * xy; }

  double min_eigenvalue() const {
    double half_tr = 0.5 * (xx + yy);
    double disc = std::sqrt(std::max(0.0, 0.25 * (xx - yy) * (xx - yy) + xy * xy));
    return half_tr - disc;
  }
  double max_eigenvalue() const {
    double half_tr = 0.5 * (xx + yy);
    double disc = std::sqrt(std::max(0.0, 0.25 * (xx - yy) * (xx - yy) + xy * xy));
    return half_tr + disc;
  }
  /// Spectral norm (matrix is symmetric).
  double spectral_norm() const {
    return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
  }
};

constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.xx * v.x + m.xy * v.y, m.xy * v.x + m.yy * v.y};
}

/// Outer product a b^T + b a^T contribution, symmetrised.
constexpr Mat2 sym_outer(Vec2 a, Vec2 b) {
  return {2.0 * a.x * b.x, a.x * b.y + a.y * b.x, 2.0 * a.y * b.y};
}

constexpr Mat2 identity2(double s = 1.0) { return {s, 0.0, s}; }

constexpr double pi() { return 3.14159265358979323846; }

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double t = std::fmod(a, 2.0 * pi());
  return t < 0.0 ? t + 2.0 * pi() : t;
}

/// Signed angular difference a-b wrapped into (-pi, pi].
inline double angle_diff(double a, double b) {
  return std::atan2(std::sin(a - b), std::cos(a - b));
}

}  // namespace twac
