#include <cmath>
#include <numeric>
#include <sstream>

#include "flatdio/errors.hpp"
#include "flatdio/surface.hpp"

namespace flatdio {

namespace {

// Reflection in a line through the origin with direction u.
Mat2 reflection_along(Vec2 u) {
  double phi = std::atan2(u.y, u.x);
  double c = std::cos(2.0 * phi), s = std::sin(2.0 * phi);
  return {c, s, s, -c};
}

}  // namespace

RationalPolygon make_rational_polygon(const std::vector<Vec2>& vertices, long max_denominator) {
  const std::size_t n = vertices.size();
  if (n < 3) throw Error(ErrorKind::NonSimplePolygon, "polygon needs at least 3 vertices");
  if (polygon_signed_area(vertices) <= 0.0) {
    throw Error(ErrorKind::InconsistentOrientation, "billiard table must be counterclockwise");
  }
  RationalPolygon Q;
  Q.vertices = vertices;
  long num_sum = 0, den_lcm = 1;
  std::vector<RationalAngle> angles;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 out = vertices[(i + 1) % n] - vertices[i];
    Vec2 in = vertices[(i + n - 1) % n] - vertices[i];
    double ang = std::atan2(cross(out, in), dot(out, in));
    if (ang <= 0) ang += 2.0 * kPi;
    double x = ang / kPi;
    RationalAngle r{0, 0};
    for (long q = 1; q <= max_denominator; ++q) {
      double p = std::round(x * static_cast<double>(q));
      if (std::abs(x - p / static_cast<double>(q)) < 1e-9) {
        r = {static_cast<long>(p), q};
        break;
      }
    }
    if (r.q == 0) {
      std::ostringstream os;
      os << "angle " << ang << " at vertex " << i << " is not a rational multiple of pi";
      throw Error(ErrorKind::IrrationalAngle, os.str(), ang);
    }
    angles.push_back(r);
    den_lcm = std::lcm(den_lcm, r.q);
  }
  for (const auto& a : angles) num_sum += a.p * (den_lcm / a.q);
  if (num_sum != static_cast<long>(n - 2) * den_lcm) {
    throw Error(ErrorKind::NonSimplePolygon, "interior angles do not sum to (n-2) pi");
  }
  Q.angles = std::move(angles);
  return Q;
}

UnfoldResult unfold_rational_polygon(const RationalPolygon& Q, long max_group) {
  const int n = static_cast<int>(Q.vertices.size());
  long N = 1;
  for (const auto& a : Q.angles) N = std::lcm(N, a.q);
  if (max_group <= 0) max_group = 2 * N * 2;

  std::vector<Mat2> refl;
  for (int i = 0; i < n; ++i) refl.push_back(reflection_along(Q.vertices[(i + 1) % n] - Q.vertices[i]));

  std::vector<Mat2> group{Mat2{}};
  auto find = [&](const Mat2& g) {
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (group[k].distance(g) < 1e-9) return static_cast<int>(k);
    }
    return -1;
  };
  // glue[k][i] = copy reached by reflecting copy k in its side i.
  std::vector<std::vector<int>> glue;
  for (std::size_t k = 0; k < group.size(); ++k) {
    glue.emplace_back(n, -1);
    for (int i = 0; i < n; ++i) {
      Mat2 h = group[k] * refl[i];
      int idx = find(h);
      if (idx < 0) {
        if (static_cast<long>(group.size()) >= max_group) {
          throw Error(ErrorKind::GroupTooLarge, "dihedral group exceeds cap", static_cast<double>(max_group));
        }
        group.push_back(h);
        idx = static_cast<int>(group.size()) - 1;
      }
      glue[k][i] = idx;
    }
  }

  double diam = 0.0;
  for (auto a : Q.vertices)
    for (auto b : Q.vertices) diam = std::max(diam, (a - b).norm());

  // Copies are laid out in a row only so that they do not overlap in plots.
  PolygonPresentation pres;
  pres.name = "unfolding";
  std::vector<bool> reversed;
  for (std::size_t k = 0; k < group.size(); ++k) {
    const Mat2& g = group[k];
    Vec2 offset{3.0 * diam * static_cast<double>(k), 0.0};
    std::vector<Vec2> poly;
    bool rev = g.det() < 0;
    for (int j = 0; j < n; ++j) {
      int src = rev ? (n - 1 - j) : j;
      poly.push_back(g * Q.vertices[src] + offset);
    }
    pres.polygons.push_back(std::move(poly));
    reversed.push_back(rev);
  }
  // Side i of Q is edge i of a direct copy and edge n-2-i of a reversed one.
  auto edge_of = [&](std::size_t copy, int side) { return reversed[copy] ? ((n - 2 - side) % n + n) % n : side; };
  for (std::size_t k = 0; k < group.size(); ++k) {
    for (int i = 0; i < n; ++i) {
      std::size_t h = static_cast<std::size_t>(glue[k][i]);
      if (h < k) continue;
      if (h == k) throw Error(ErrorKind::InvalidPairing, "side glued to its own copy");
      pres.pairings.push_back({static_cast<int>(k), edge_of(k, i), static_cast<int>(h), edge_of(h, i)});
    }
  }
  UnfoldResult out{build_surface(std::move(pres)), group};
  return out;
}

}  // namespace flatdio
