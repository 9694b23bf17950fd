#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "flatdio/errors.hpp"
#include "flatdio/surface.hpp"

namespace flatdio {

namespace {

double min_angle(Vec2 a, Vec2 b, Vec2 c) {
  auto ang = [](Vec2 p, Vec2 q, Vec2 r) {
    Vec2 u = q - p, w = r - p;
    return std::atan2(std::abs(cross(u, w)), dot(u, w));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

// Point inside or on the boundary of the ccw triangle (a, b, c).
bool in_closed_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c, double tol) {
  return cross(b - a, p - a) >= -tol && cross(c - b, p - b) >= -tol && cross(a - c, p - c) >= -tol;
}

// Ear clipping on vertex indices. Vertices with a straight angle stay in the
// loop until a neighbour is clipped; they are never clipped themselves, so
// every polygon vertex ends up a triangle vertex.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly, double scale) {
  std::vector<int> loop(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) loop[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> out;
  const double tol = 1e-12 * scale * scale;
  while (loop.size() > 3) {
    const std::size_t n = loop.size();
    int best = -1;
    double best_angle = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      int ip = loop[(i + n - 1) % n], ic = loop[i], in = loop[(i + 1) % n];
      Vec2 a = poly[ip], b = poly[ic], c = poly[in];
      if (cross(b - a, c - b) <= tol) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < n && !blocked; ++j) {
        int k = loop[j];
        if (k == ip || k == ic || k == in) continue;
        if (in_closed_triangle(poly[k], a, b, c, tol)) blocked = true;
      }
      if (blocked) continue;
      double q = min_angle(a, b, c);
      if (q > best_angle) {
        best_angle = q;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) throw Error(ErrorKind::NonSimplePolygon, "triangulation failed: no ear found");
    std::size_t i = static_cast<std::size_t>(best);
    out.push_back({loop[(i + n - 1) % n], loop[i], loop[(i + 1) % n]});
    loop.erase(loop.begin() + static_cast<long>(i));
  }
  Vec2 a = poly[loop[0]], b = poly[loop[1]], c = poly[loop[2]];
  if (cross(b - a, c - b) <= tol) throw Error(ErrorKind::NonSimplePolygon, "triangulation left a degenerate triangle");
  out.push_back({loop[0], loop[1], loop[2]});
  return out;
}

}  // namespace

std::vector<Triangle> triangulate_presentation(const PolygonPresentation& pres,
                                               const std::vector<std::vector<int>>& vsing,
                                               const std::vector<std::vector<EdgeRef>>& partner,
                                               const std::vector<std::vector<Vec2>>& shift,
                                               double scale) {
  std::vector<Triangle> tris;
  // (polygon, edge) -> (triangle, side) for polygon boundary edges.
  std::vector<std::vector<std::pair<int, int>>> boundary(pres.polygons.size());
  for (std::size_t p = 0; p < pres.polygons.size(); ++p) {
    const auto& poly = pres.polygons[p];
    const int n = static_cast<int>(poly.size());
    boundary[p].assign(poly.size(), {-1, -1});
    std::map<std::pair<int, int>, std::pair<int, int>> diagonals;
    for (const auto& ear : ear_clip(poly, scale)) {
      Triangle t;
      t.polygon = static_cast<int>(p);
      int id = static_cast<int>(tris.size());
      for (int k = 0; k < 3; ++k) {
        t.v[k] = poly[ear[k]];
        t.sing[k] = vsing[p][ear[k]];
        t.nb_tri[k] = -1;
        t.nb_edge[k] = -1;
      }
      tris.push_back(t);
      for (int k = 0; k < 3; ++k) {
        int i = ear[k], j = ear[(k + 1) % 3];
        if (j == (i + 1) % n) {
          boundary[p][i] = {id, k};
        } else {
          auto key = std::minmax(i, j);
          auto it = diagonals.find(key);
          if (it == diagonals.end()) {
            diagonals[key] = {id, k};
          } else {
            auto [ot, ok] = it->second;
            tris[id].nb_tri[k] = ot;
            tris[id].nb_edge[k] = ok;
            tris[ot].nb_tri[ok] = id;
            tris[ot].nb_edge[ok] = k;
          }
        }
      }
    }
  }
  for (std::size_t p = 0; p < pres.polygons.size(); ++p) {
    for (std::size_t e = 0; e < pres.polygons[p].size(); ++e) {
      auto [t, k] = boundary[p][e];
      EdgeRef o = partner[p][e];
      auto [ot, ok] = boundary[o.polygon][o.edge];
      tris[t].nb_tri[k] = ot;
      tris[t].nb_edge[k] = ok;
      tris[t].shift[k] = shift[p][e];
    }
  }
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) {
      if (t.nb_tri[k] < 0) throw Error(ErrorKind::NonSimplePolygon, "triangulation left an unmatched side");
    }
  }
  return tris;
}

}  // namespace flatdio
