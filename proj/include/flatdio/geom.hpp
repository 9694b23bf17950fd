#pragma once

#include <cmath>
#include <numbers>

namespace flatdio {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Row-major [[a, b], [c, d]]. Elements of SL(2,R) in practice; the type does
// not enforce det = 1 so that reflections can reuse it (see unfolding).
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 inverse() const;
  // Max absolute entry difference.
  double distance(const Mat2& o) const;
  // Operator 2-norm.
  double op_norm() const;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// Reduce any angle mod pi into the canonical range [-pi/2, pi/2).
double canonical_direction(double theta);

// Distance between two directions on the circle R / pi Z.
double direction_distance(double a, double b);

// diag(e^t, e^-t).
Mat2 geodesic_matrix(double t);
// [[cos, -sin], [sin, cos]].
Mat2 rotation_matrix(double theta);
// [[1, s], [0, 1]].
Mat2 horocycle_matrix(double s);

struct HolonomyParts {
  double re = 0.0;
  double im = 0.0;
};

// r_theta * v split into horizontal (re) and vertical (im) parts.
HolonomyParts holonomy_components(double theta, Vec2 v);

struct MinimizingInstant {
  double t_star = 0.0;
  double min_norm = 0.0;
};

// Instant t minimizing |g_t r_theta v| and the minimal value.
// Throws DegenerateDirection when |re| or |im| is below 1e-300.
MinimizingInstant minimizing_instant(double theta, Vec2 v);
MinimizingInstant minimizing_instant_parts(double re, double im);

// Angle of v from the vertical, reduced into [-pi/2, pi/2). Throws ZeroVector.
double direction_of(Vec2 v);

// Unit vector pointing in direction theta (angle from the vertical, clockwise
// positive): (sin theta, cos theta).
inline Vec2 direction_vector(double theta) { return {std::sin(theta), std::cos(theta)}; }

}  // namespace flatdio
