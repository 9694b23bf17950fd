#include "flatdio/geom.hpp"

#include <algorithm>

#include "flatdio/errors.hpp"

namespace flatdio {

Mat2 Mat2::inverse() const {
  double dt = det();
  return {d / dt, -b / dt, -c / dt, a / dt};
}

double Mat2::distance(const Mat2& o) const {
  return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c), std::abs(d - o.d)});
}

double Mat2::op_norm() const {
  // Largest singular value from the 2x2 closed form.
  double s = a * a + b * b + c * c + d * d;
  double dt = det();
  double disc = std::sqrt(std::max(0.0, s * s - 4.0 * dt * dt));
  return std::sqrt((s + disc) / 2.0);
}

double canonical_direction(double theta) {
  double r = std::fmod(theta + kHalfPi, kPi);
  if (r < 0) r += kPi;
  double out = r - kHalfPi;
  if (out >= kHalfPi) out -= kPi;
  return out;
}

double direction_distance(double a, double b) {
  double d = std::abs(canonical_direction(a) - canonical_direction(b));
  return std::min(d, kPi - d);
}

Mat2 geodesic_matrix(double t) { return {std::exp(t), 0.0, 0.0, std::exp(-t)}; }

Mat2 rotation_matrix(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

Mat2 horocycle_matrix(double s) { return {1.0, s, 0.0, 1.0}; }

HolonomyParts holonomy_components(double theta, Vec2 v) {
  Vec2 w = rotation_matrix(theta) * v;
  return {w.x, w.y};
}

MinimizingInstant minimizing_instant_parts(double re, double im) {
  double are = std::abs(re), aim = std::abs(im);
  if (are < 1e-300 || aim < 1e-300) {
    throw Error(ErrorKind::DegenerateDirection, "Re or Im vanishes");
  }
  return {0.5 * (std::log(aim) - std::log(are)), std::sqrt(2.0 * are * aim)};
}

MinimizingInstant minimizing_instant(double theta, Vec2 v) {
  HolonomyParts h = holonomy_components(theta, v);
  return minimizing_instant_parts(h.re, h.im);
}

double direction_of(Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) throw Error(ErrorKind::ZeroVector, "direction of zero vector");
  return canonical_direction(std::atan2(v.x, v.y));
}

}  // namespace flatdio
