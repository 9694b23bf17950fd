#include <algorithm>
#include <cmath>
#include <map>

#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"
#include "flatdio/scan.hpp"

namespace flatdio {

namespace {

// The surface rotated so that the flow direction points up. Each triangulation
// side is shared by two triangles; a non-vertical side is the top side of
// exactly one of them, and positions along it are stored as x in that chart.
struct VerticalFrame {
  struct Tri {
    std::array<Vec2, 3> v;
    std::array<Vec2, 3> shift;
  };
  std::vector<Tri> tris;
  std::vector<int> edge_id;       // 3 * tri + side -> surface edge id
  std::vector<int> top_tri, top_side;
  std::vector<double> xmin, xmax;
  double tol = 0.0;
};

bool is_top(const VerticalFrame::Tri& T, int j) { return T.v[(j + 1) % 3].x - T.v[j].x < 0.0; }

double y_on_side(const VerticalFrame::Tri& T, int j, double x) {
  Vec2 a = T.v[j], b = T.v[(j + 1) % 3];
  double s = (x - a.x) / (b.x - a.x);
  return a.y + s * (b.y - a.y);
}

VerticalFrame make_frame(const TranslationSurface& X, double theta) {
  VerticalFrame F;
  Mat2 R = rotation_matrix(theta);
  const auto& tris = X.triangles();
  F.tol = 1e-10 * X.diameter();
  F.tris.resize(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      F.tris[t].v[k] = R * tris[t].v[k];
      F.tris[t].shift[k] = R * tris[t].shift[k];
    }
  }
  F.edge_id.assign(tris.size() * 3, -1);
  for (std::size_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      if (F.edge_id[3 * t + k] >= 0) continue;
      int id = static_cast<int>(F.top_tri.size());
      int ot = tris[t].nb_tri[k], ok = tris[t].nb_edge[k];
      F.edge_id[3 * t + k] = id;
      F.edge_id[3 * ot + ok] = id;
      int tt = static_cast<int>(t), tk = k;
      if (!is_top(F.tris[t], k)) {
        tt = ot;
        tk = ok;
      }
      F.top_tri.push_back(tt);
      F.top_side.push_back(tk);
      Vec2 a = F.tris[tt].v[tk], b = F.tris[tt].v[(tk + 1) % 3];
      F.xmin.push_back(std::min(a.x, b.x));
      F.xmax.push_back(std::max(a.x, b.x));
    }
  }
  return F;
}

struct Separatrix {
  double length = 0.0;
  bool complete = false;  // reached a singularity within the cap
  std::vector<std::pair<int, double>> marks;  // (edge id, x)
};

// Follows the upward leaf from the vertex `k` of triangle `t`.
Separatrix trace_up(const VerticalFrame& F, int t, int k, double cap, const TranslationSurface& X) {
  Separatrix s;
  const auto& tris = X.triangles();
  Vec2 p = F.tris[t].v[k];
  int cur = t;
  std::size_t guard = 0;
  while (true) {
    if (++guard > 100000000) break;
    const auto& T = F.tris[cur];
    int exit = -1;
    for (int j = 0; j < 3; ++j) {
      if (!is_top(T, j)) continue;
      double lo = std::min(T.v[j].x, T.v[(j + 1) % 3].x), hi = std::max(T.v[j].x, T.v[(j + 1) % 3].x);
      if (p.x > lo + F.tol && p.x < hi - F.tol) {
        exit = j;
        break;
      }
    }
    if (exit < 0) {
      // The leaf runs into a vertex of this triangle.
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 3; ++j) {
        if (std::abs(T.v[j].x - p.x) <= F.tol && T.v[j].y > p.y + F.tol) best = std::min(best, T.v[j].y);
      }
      if (std::isfinite(best)) {
        s.length += best - p.y;
        s.complete = s.length <= cap;
      }
      return s;
    }
    double y = y_on_side(T, exit, p.x);
    s.length += y - p.y;
    if (s.length > cap) return s;
    s.marks.push_back({F.edge_id[3 * cur + exit], p.x});
    p = Vec2{p.x, y} + T.shift[exit];
    cur = tris[cur].nb_tri[exit];
  }
  return s;
}

}  // namespace

std::vector<Cylinder> cylinders_in_direction(const TranslationSurface& X, Vec2 dir, double max_circ) {
  const double theta = direction_of(dir);
  VerticalFrame F = make_frame(X, theta);
  const auto& tris = X.triangles();
  const double cap = max_circ * (1.0 + 1e-9) + F.tol;
  const Vec2 up_unit = direction_vector(theta);
  const Vec2 up{0.0, 1.0};

  std::vector<Separatrix> seps;
  std::vector<double> vertical_edges;  // lengths of sides parallel to the flow
  // Vertical sides keyed by (tri, side) for boundary detection.
  std::vector<std::pair<int, int>> vertical_sides;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& T = F.tris[t];
    for (int k = 0; k < 3; ++k) {
      Vec2 lo = T.v[(k + 1) % 3] - T.v[k];
      Vec2 hi = T.v[(k + 2) % 3] - T.v[k];
      if (std::abs(lo.x) <= F.tol) {
        vertical_sides.push_back({static_cast<int>(t), k});
        if (lo.y > 0) vertical_edges.push_back(lo.y);
        continue;
      }
      if (cross(lo, up) > 1e-12 * lo.norm() && cross(up, hi) > 1e-12 * hi.norm()) {
        seps.push_back(trace_up(F, static_cast<int>(t), k, cap, X));
      }
    }
  }

  const int nedges = static_cast<int>(F.top_tri.size());
  std::vector<std::vector<std::pair<double, int>>> marks(nedges);  // (x, separatrix)
  for (std::size_t i = 0; i < seps.size(); ++i) {
    for (auto [e, x] : seps[i].marks) marks[e].push_back({x, static_cast<int>(i)});
  }

  struct Piece {
    int edge;
    double x1, x2;
  };
  std::vector<Piece> pieces;
  std::vector<int> first_piece(nedges + 1, 0);
  for (int e = 0; e < nedges; ++e) {
    first_piece[e] = static_cast<int>(pieces.size());
    if (F.xmax[e] - F.xmin[e] <= F.tol) continue;
    std::vector<double> cuts{F.xmin[e], F.xmax[e]};
    for (auto [x, i] : marks[e]) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> uniq;
    for (double c : cuts) {
      if (uniq.empty() || c - uniq.back() > F.tol) uniq.push_back(c);
    }
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) pieces.push_back({e, uniq[i], uniq[i + 1]});
  }
  first_piece[nedges] = static_cast<int>(pieces.size());

  auto find_piece = [&](int e, double x1, double x2) {
    auto begin = pieces.begin() + first_piece[e], end = pieces.begin() + first_piece[e + 1];
    auto it = std::lower_bound(begin, end, x1 - F.tol, [](const Piece& p, double v) { return p.x1 < v; });
    if (it != end && std::abs(it->x1 - x1) <= F.tol && std::abs(it->x2 - x2) <= F.tol) {
      return static_cast<int>(it - pieces.begin());
    }
    return -1;
  };

  const int np = static_cast<int>(pieces.size());
  std::vector<int> next(np, -1);
  std::vector<double> travel(np, 0.0);
  for (int i = 0; i < np; ++i) {
    const Piece& P = pieces[i];
    int tb = F.top_tri[P.edge], kb = F.top_side[P.edge];
    int ta = tris[tb].nb_tri[kb], ka = tris[tb].nb_edge[kb];
    Vec2 s = F.tris[tb].shift[kb];
    double x1 = P.x1 + s.x, x2 = P.x2 + s.x, xm = 0.5 * (x1 + x2);
    const auto& T = F.tris[ta];
    for (int j = 0; j < 3; ++j) {
      if (!is_top(T, j)) continue;
      double lo = std::min(T.v[j].x, T.v[(j + 1) % 3].x), hi = std::max(T.v[j].x, T.v[(j + 1) % 3].x);
      if (x1 >= lo - F.tol && x2 <= hi + F.tol) {
        int target = find_piece(F.edge_id[3 * ta + j], x1, x2);
        if (target >= 0) {
          next[i] = target;
          travel[i] = y_on_side(T, j, xm) - y_on_side(T, ka, xm);
        }
        break;
      }
    }
  }

  std::vector<Cylinder> out;
  std::vector<int> state(np, 0);  // 0 new, 1 on current path, 2 done
  for (int i = 0; i < np; ++i) {
    if (state[i]) continue;
    std::vector<int> path;
    int cur = i;
    while (cur >= 0 && state[cur] == 0 && path.size() < 1000000) {
      state[cur] = 1;
      path.push_back(cur);
      cur = next[cur];
    }
    if (cur >= 0 && state[cur] == 1) {
      auto it = std::find(path.begin(), path.end(), cur);
      std::vector<int> cyc(it, path.end());
      double c = 0.0;
      for (int p : cyc) c += travel[p];
      double w = pieces[cyc.front()].x2 - pieces[cyc.front()].x1;
      if (c > 0 && c <= cap) {
        Cylinder C;
        C.circumference = c;
        C.width = w;
        C.area = c * w;
        C.theta = theta;
        C.core = up_unit * c;
        // Boundary: completed separatrices crossing the piece endpoints, and
        // vertical sides sharing an x with a piece endpoint in either chart.
        std::vector<double> bl;
        for (int p : cyc) {
          const Piece& P = pieces[p];
          for (auto [x, si] : marks[P.edge]) {
            if ((std::abs(x - P.x1) <= F.tol || std::abs(x - P.x2) <= F.tol) && seps[si].complete) {
              bl.push_back(seps[si].length);
            }
          }
          int tb = F.top_tri[P.edge], kb = F.top_side[P.edge];
          int ta = tris[tb].nb_tri[kb];
          Vec2 s = F.tris[tb].shift[kb];
          for (auto [vt, vk] : vertical_sides) {
            double xv = F.tris[vt].v[vk].x;
            double ylen = std::abs(F.tris[vt].v[(vk + 1) % 3].y - F.tris[vt].v[vk].y);
            if (vt == tb && (std::abs(xv - P.x1) <= F.tol || std::abs(xv - P.x2) <= F.tol)) bl.push_back(ylen);
            if (vt == ta && (std::abs(xv - P.x1 - s.x) <= F.tol || std::abs(xv - P.x2 - s.x) <= F.tol)) {
              bl.push_back(ylen);
            }
          }
        }
        std::sort(bl.begin(), bl.end());
        for (double l : bl) {
          if (C.boundary.empty() || std::abs(C.boundary.back().norm() - l) > 1e-9 * std::max(1.0, l)) {
            C.boundary.push_back(up_unit * l);
          }
        }
        out.push_back(std::move(C));
      }
    }
    for (int p : path) state[p] = 2;
  }
  std::sort(out.begin(), out.end(), [](const Cylinder& a, const Cylinder& b) {
    if (a.circumference != b.circumference) return a.circumference < b.circumference;
    return a.width < b.width;
  });
  return out;
}

std::vector<Cylinder> enumerate_cylinders(const TranslationSurface& X, double L) {
  ResonantSet dirs = resonant_sc(X, L);
  std::vector<std::vector<Cylinder>> per(dirs.records.size());
  parallel_for(dirs.records.size(), 0, [&](std::size_t i) {
    per[i] = cylinders_in_direction(X, dirs.records[i].rep, L);
  });
  std::vector<Cylinder> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(), [](const Cylinder& a, const Cylinder& b) {
    if (a.circumference != b.circumference) return a.circumference < b.circumference;
    return a.theta < b.theta;
  });
  return out;
}

}  // namespace flatdio
