#include "flatdio/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>

#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"

namespace flatdio {

std::uint64_t default_scan_budget() {
  if (const char* env = std::getenv("FLATDIO_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 400000000ULL;
}

namespace {

constexpr double kParallelTol = 1e-9;

// Arc [a, a + w] on the circle R / pi Z.
bool arcs_meet(double a, double wa, double b, double wb) {
  auto fwd = [](double from, double to) {
    double d = std::fmod(to - from, kPi);
    if (d < 0) d += kPi;
    return d;
  };
  const double slack = 1e-12;
  return fwd(a, b) <= wa + slack || fwd(b, a) <= wb + slack;
}

struct Frame {
  int tri;
  int edge;  // the window leaves `tri` through this side
  Vec2 D;    // developed(x) = x + D for x in tri's chart
  Vec2 lo;
  Vec2 hi;
};

class Developer {
 public:
  Developer(const TranslationSurface& X, const ScanRegion& R, std::atomic<std::uint64_t>& nodes, std::uint64_t budget)
      : X_(X), R_(R), nodes_(nodes), budget_(budget), L2_(R.max_length * R.max_length * (1.0 + 1e-12)) {
    if (R.use_box) rot_ = rotation_matrix(R.box_theta);
    if (R.use_sector) {
      sec_lo_ = canonical_direction(R.sector_lo);
      double w = R.sector_hi - R.sector_lo;
      sec_w_ = w >= kPi ? kPi : std::fmod(w + 2 * kPi, kPi);
      if (w >= kPi) sec_full_ = true;
    }
  }

  void run_corner(int t, int k, std::vector<SaddleConnection>& out) {
    const auto& tris = X_.triangles();
    const Triangle& T = tris[t];
    Vec2 O = T.v[k];
    Vec2 u = T.v[(k + 1) % 3] - O;
    if (in_region(u)) out.push_back({u, T.sing[k], T.sing[(k + 1) % 3], t, k});
    Vec2 hi = T.v[(k + 2) % 3] - O;
    std::vector<Frame> stack;
    Frame f{t, (k + 1) % 3, -O, u, hi};
    if (may_hit(f)) stack.push_back(f);
    while (!stack.empty()) {
      Frame cur = stack.back();
      stack.pop_back();
      if (nodes_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_) {
        throw Error(ErrorKind::BudgetExceeded, "saddle connection enumeration exceeded its node budget",
                    static_cast<double>(budget_));
      }
      const Triangle& A = tris[cur.tri];
      int t2 = A.nb_tri[cur.edge];
      int e2 = A.nb_edge[cur.edge];
      Vec2 D2 = cur.D - A.shift[cur.edge];
      const Triangle& B = tris[t2];
      Vec2 w = B.v[(e2 + 2) % 3] + D2;
      double cl = cross(cur.lo, w), ch = cross(w, cur.hi);
      double wn = w.norm();
      bool inside_lo = cl > kParallelTol * cur.lo.norm() * wn;
      bool inside_hi = ch > kParallelTol * cur.hi.norm() * wn;
      if (inside_lo && inside_hi) {
        if (in_region(w)) out.push_back({w, T.sing[k], B.sing[(e2 + 2) % 3], t, k});
        Frame a{t2, (e2 + 1) % 3, D2, cur.lo, w};
        Frame b{t2, (e2 + 2) % 3, D2, w, cur.hi};
        if (may_hit(b)) stack.push_back(b);
        if (may_hit(a)) stack.push_back(a);
      } else if (!inside_lo) {
        Frame a{t2, (e2 + 2) % 3, D2, cur.lo, cur.hi};
        if (may_hit(a)) stack.push_back(a);
      } else {
        Frame a{t2, (e2 + 1) % 3, D2, cur.lo, cur.hi};
        if (may_hit(a)) stack.push_back(a);
      }
    }
  }

 private:
  bool in_region(Vec2 w) const {
    if (w.norm2() > L2_) return false;
    if (R_.use_box) {
      Vec2 r = rot_ * w;
      if (std::abs(r.x) > R_.box_re || std::abs(r.y) > R_.box_im) return false;
    }
    if (R_.use_sector && !sec_full_) {
      double th = direction_of(w);
      if (!arcs_meet(sec_lo_, sec_w_, th, 0.0)) return false;
    }
    return true;
  }

  // Does any ray of the window, beyond the exit side, reach the region?
  bool may_hit(const Frame& f) const {
    const Triangle& A = X_.triangles()[f.tri];
    Vec2 b = A.v[f.edge] + f.D;            // lo side
    Vec2 a = A.v[(f.edge + 1) % 3] + f.D;  // hi side
    if (R_.use_sector && !sec_full_) {
      double th_hi = direction_of(f.hi);
      double width = std::atan2(cross(f.lo, f.hi), dot(f.lo, f.hi));
      if (!arcs_meet(th_hi, width, sec_lo_, sec_w_)) return false;
    }
    Vec2 ab = a - b;
    auto param = [&](Vec2 dir) {
      double den = cross(dir, ab);
      if (den == 0.0) return 0.0;
      return std::clamp(-cross(dir, b) / den, 0.0, 1.0);
    };
    double s0 = param(f.lo), s1 = param(f.hi);
    if (s0 > s1) std::swap(s0, s1);
    Vec2 p = b + ab * s0, q = b + ab * s1;
    if (R_.use_box) {
      // Liang-Barsky clip of [p, q] against the rotated box.
      Vec2 pr = rot_ * p, qr = rot_ * q;
      Vec2 d = qr - pr;
      double t0 = 0.0, t1 = 1.0;
      double ps[4] = {-d.x, d.x, -d.y, d.y};
      double qs[4] = {pr.x + R_.box_re, R_.box_re - pr.x, pr.y + R_.box_im, R_.box_im - pr.y};
      const double eps = 1e-12 * (R_.box_re + R_.box_im);
      for (int i = 0; i < 4; ++i) {
        if (ps[i] == 0.0) {
          if (qs[i] < -eps) return false;
        } else {
          double r = qs[i] / ps[i];
          if (ps[i] < 0) t0 = std::max(t0, r);
          else t1 = std::min(t1, r);
        }
      }
      if (t0 > t1 + 1e-12) return false;
      Vec2 pq = q - p;
      Vec2 np = p + pq * t0, nq = p + pq * std::min(1.0, std::max(t0, t1));
      p = np;
      q = nq;
    }
    Vec2 pq = q - p;
    double len2 = pq.norm2();
    double s = len2 > 0 ? std::clamp(-dot(p, pq) / len2, 0.0, 1.0) : 0.0;
    Vec2 c = p + pq * s;
    return c.norm2() <= L2_;
  }

  const TranslationSurface& X_;
  const ScanRegion& R_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  double L2_;
  Mat2 rot_;
  double sec_lo_ = 0.0, sec_w_ = 0.0;
  bool sec_full_ = false;
};

bool sc_less(const SaddleConnection& a, const SaddleConnection& b) {
  double la = a.holonomy.norm2(), lb = b.holonomy.norm2();
  if (la != lb) return la < lb;
  double ta = std::atan2(a.holonomy.y, a.holonomy.x), tb = std::atan2(b.holonomy.y, b.holonomy.x);
  if (ta != tb) return ta < tb;
  if (a.start_sing != b.start_sing) return a.start_sing < b.start_sing;
  if (a.start_tri != b.start_tri) return a.start_tri < b.start_tri;
  return a.start_corner < b.start_corner;
}

}  // namespace

std::vector<SaddleConnection> enumerate_in_region(const TranslationSurface& X, const ScanRegion& region) {
  if (!(region.max_length > 0.0)) return {};
  std::uint64_t budget = region.budget ? region.budget : default_scan_budget();
  const std::size_t ncorners = X.triangles().size() * 3;
  std::vector<std::vector<SaddleConnection>> per(ncorners);
  std::atomic<std::uint64_t> nodes{0};
  parallel_for(ncorners, region.threads, [&](std::size_t i) {
    Developer dev(X, region, nodes, budget);
    dev.run_corner(static_cast<int>(i / 3), static_cast<int>(i % 3), per[i]);
  });
  std::vector<SaddleConnection> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end(), sc_less);
  return out;
}

std::vector<SaddleConnection> enumerate_saddle_connections(const TranslationSurface& X, double L) {
  ScanRegion r;
  r.max_length = L;
  return enumerate_in_region(X, r);
}

std::vector<ChartSegment> chart_path(const TranslationSurface& X, const SaddleConnection& sc) {
  const auto& tris = X.triangles();
  std::vector<ChartSegment> out;
  const Triangle& T0 = tris[sc.start_tri];
  const int k = sc.start_corner;
  Vec2 O = T0.v[k];
  Vec2 w = sc.holonomy;
  Vec2 u = T0.v[(k + 1) % 3] - O;
  if (std::abs(cross(u, w)) <= kParallelTol * u.norm() * w.norm() && dot(u, w) > 0) {
    out.push_back({sc.start_tri, O, O + w});
    return out;
  }
  int t = sc.start_tri;
  int entry = -1;
  Vec2 D = -O;  // developed(x) = x + D
  double lam = 0.0;
  for (std::size_t guard = 0; guard < 100000000; ++guard) {
    const Triangle& T = tris[t];
    double best = 2.0;
    int exit = -1;
    for (int j = 0; j < 3; ++j) {
      if (j == entry) continue;
      Vec2 a = T.v[j] + D, b = T.v[(j + 1) % 3] + D;
      double den = cross(w, b - a);
      if (den == 0.0) continue;
      // O + s w on the line through a, b.
      double s = cross(a, b - a) / den;
      double r = cross(a, w) / den;
      if (s > lam + 1e-12 && r >= -1e-9 && r <= 1.0 + 1e-9 && s < best) {
        best = s;
        exit = j;
      }
    }
    if (exit < 0 || best >= 1.0 - 1e-9) {
      out.push_back({t, w * lam - D, w - D});
      return out;
    }
    out.push_back({t, w * lam - D, w * best - D});
    lam = best;
    D = D - T.shift[exit];
    entry = T.nb_edge[exit];
    t = T.nb_tri[exit];
  }
  return out;
}

double systole(const TranslationSurface& X) {
  double L = std::numeric_limits<double>::infinity();
  for (const auto& t : X.triangles())
    for (int k = 0; k < 3; ++k) L = std::min(L, (t.v[(k + 1) % 3] - t.v[k]).norm());
  auto scs = enumerate_saddle_connections(X, L * (1.0 + 1e-9));
  double best = L;
  for (const auto& s : scs) best = std::min(best, s.length());
  return best;
}

const char* resonant_kind_name(ResonantKind k) { return k == ResonantKind::sc ? "sc" : "cyl"; }

ResonantSet resonant_from_vectors(const std::vector<Vec2>& vs, double L, ResonantKind kind) {
  std::vector<ResonantRecord> recs;
  recs.reserve(vs.size());
  for (auto v : vs) {
    if (v.norm() > L * (1.0 + 1e-12)) continue;
    recs.push_back({direction_of(v), v.norm(), v});
  }
  std::sort(recs.begin(), recs.end(), [](const ResonantRecord& a, const ResonantRecord& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.l < b.l;
  });
  ResonantSet out;
  out.kind = kind;
  out.length_bound = L;
  // Parallel vectors sit next to each other after the theta sort, up to
  // rounding; compare against the group's representative with the cross test.
  for (const auto& r : recs) {
    if (!out.records.empty()) {
      auto& last = out.records.back();
      if (std::abs(cross(last.rep, r.rep)) <= kParallelTol * last.l * r.l) {
        if (r.l < last.l) last = r;
        continue;
      }
    }
    out.records.push_back(r);
  }
  // Wrap-around: a direction near -pi/2 may duplicate one just below +pi/2.
  if (out.records.size() > 1) {
    auto& first = out.records.front();
    auto& last = out.records.back();
    if (std::abs(cross(last.rep, first.rep)) <= kParallelTol * last.l * first.l) {
      if (last.l < first.l) first = last;
      out.records.pop_back();
    }
  }
  return out;
}

ResonantSet resonant_sc_region(const TranslationSurface& X, const ScanRegion& region) {
  auto scs = enumerate_in_region(X, region);
  std::vector<Vec2> vs;
  vs.reserve(scs.size());
  for (const auto& s : scs) vs.push_back(s.holonomy);
  ResonantSet R = resonant_from_vectors(vs, region.max_length, ResonantKind::sc);
  R.surface = X.name();
  R.m = X.m();
  return R;
}

ResonantSet resonant_sc(const TranslationSurface& X, double L) {
  ScanRegion r;
  r.max_length = L;
  return resonant_sc_region(X, r);
}

ResonantSet resonant_sc_window(const TranslationSurface& X, double center, double halfwidth, double L) {
  ScanRegion r;
  r.max_length = L;
  if (2.0 * halfwidth < kPi) {
    r.use_sector = true;
    r.sector_lo = center - halfwidth;
    r.sector_hi = center + halfwidth;
  }
  ResonantSet R = resonant_sc_region(X, r);
  if (r.use_sector) {
    std::vector<ResonantRecord> keep;
    for (const auto& rec : R.records) {
      if (direction_distance(rec.theta, center) <= halfwidth) keep.push_back(rec);
    }
    R.records = std::move(keep);
  }
  return R;
}

ResonantSet resonant_cyl(const TranslationSurface& X, double L) {
  if (std::abs(X.area() - 1.0) > 1e-9) {
    throw Error(ErrorKind::NotUnitArea, "cylinder resonant set needs a unit-area surface", X.area());
  }
  auto cyls = enumerate_cylinders(X, L);
  const double thresh = 1.0 / X.m();
  std::vector<ResonantRecord> recs;
  for (const auto& c : cyls) {
    // Strict area > 1/m, except that a cylinder filling X is kept: on the
    // torus m = 1 and every cylinder has area exactly 1.
    bool fills = std::abs(c.area - X.area()) <= 1e-9;
    if (!(c.area > thresh) && !fills) continue;
    ResonantRecord r{direction_of(c.core), c.circumference, c.core, c.width, c.area};
    recs.push_back(r);
  }
  std::sort(recs.begin(), recs.end(), [](const ResonantRecord& a, const ResonantRecord& b) {
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.l < b.l;
  });
  ResonantSet out;
  out.kind = ResonantKind::cyl;
  out.length_bound = L;
  out.surface = X.name();
  out.m = X.m();
  for (const auto& r : recs) {
    if (!out.records.empty()) {
      auto& last = out.records.back();
      if (std::abs(cross(last.rep, r.rep)) <= kParallelTol * last.l * r.l) {
        if (r.l < last.l) last = r;
        continue;
      }
    }
    out.records.push_back(r);
  }
  if (out.records.size() > 1) {
    auto& first = out.records.front();
    auto& last = out.records.back();
    if (std::abs(cross(last.rep, first.rep)) <= kParallelTol * last.l * first.l) {
      if (last.l < first.l) first = last;
      out.records.pop_back();
    }
  }
  return out;
}

double cyl_shortest(const TranslationSurface& X) {
  double L = 2.0 * systole(X);
  for (int i = 0; i < 40; ++i) {
    ResonantSet R = resonant_cyl(X, L);
    if (!R.empty()) {
      double best = R.records.front().l;
      for (const auto& r : R.records) best = std::min(best, r.l);
      return best;
    }
    L *= 2.0;
  }
  throw Error(ErrorKind::BudgetExceeded, "no cylinder of area > 1/m found", L);
}

std::vector<Vec2> torus_oracle(double L) {
  if (L > 1e4) throw Error(ErrorKind::BudgetExceeded, "torus oracle limited to L <= 1e4", L);
  std::vector<Vec2> out;
  const long n = static_cast<long>(std::floor(L));
  const double L2 = L * L;
  for (long p = -n; p <= n; ++p) {
    for (long q = -n; q <= n; ++q) {
      if (static_cast<double>(p * p + q * q) > L2) continue;
      if (std::gcd(std::labs(p), std::labs(q)) != 1) continue;
      out.push_back({static_cast<double>(p), static_cast<double>(q)});
    }
  }
  std::sort(out.begin(), out.end(), [](Vec2 a, Vec2 b) {
    if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
    return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
  });
  return out;
}

std::vector<ResonantRecord> torus_sector_records(double center, double halfwidth, double L) {
  std::vector<ResonantRecord> out;
  if (!(L >= 1.0)) return out;
  const double L2 = L * L * (1.0 + 1e-12);
  // Unwrap the sector into pieces of (-pi/2, pi/2); -pi/2 itself is (1, 0).
  std::vector<std::pair<double, double>> pieces;
  bool full = halfwidth >= kHalfPi;
  if (full) {
    pieces.push_back({-kHalfPi, kHalfPi});
  } else {
    double c = canonical_direction(center);
    double lo = c - halfwidth, hi = c + halfwidth;
    if (lo < -kHalfPi) {
      pieces.push_back({-kHalfPi, hi});
      pieces.push_back({lo + kPi, kHalfPi});
    } else if (hi >= kHalfPi) {
      pieces.push_back({lo, kHalfPi});
      pieces.push_back({-kHalfPi, hi - kPi});
    } else {
      pieces.push_back({lo, hi});
    }
  }
  auto keep = [&](double th) { return full || direction_distance(th, center) <= halfwidth; };
  if (keep(-kHalfPi)) out.push_back({-kHalfPi, 1.0, {1.0, 0.0}});
  const long ymax = static_cast<long>(std::floor(L));
  for (const auto& [a, b] : pieces) {
    for (long y = 1; y <= ymax; ++y) {
      const double yd = static_cast<double>(y);
      const double xr = std::sqrt(std::max(0.0, L2 - yd * yd));
      double xa = a <= -kHalfPi + 1e-15 ? -xr : std::max(-xr, yd * std::tan(a));
      double xb = b >= kHalfPi - 1e-15 ? xr : std::min(xr, yd * std::tan(b));
      long x0 = static_cast<long>(std::ceil(xa - 1e-9)), x1 = static_cast<long>(std::floor(xb + 1e-9));
      for (long x = x0; x <= x1; ++x) {
        if (std::gcd(std::labs(x), y) != 1) continue;
        Vec2 v{static_cast<double>(x), yd};
        if (v.norm2() > L2) continue;
        double th = direction_of(v);
        if (!keep(th)) continue;
        out.push_back({th, v.norm(), v});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ResonantRecord& u, const ResonantRecord& v) { return u.theta < v.theta; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ResonantRecord& u, const ResonantRecord& v) { return u.rep == v.rep; }),
            out.end());
  return out;
}

void write_saddle_csv(std::ostream& out, const std::vector<SaddleConnection>& scs) {
  out << "kind,theta,re,im,length,width,area\n";
  out.precision(17);
  for (const auto& s : scs) {
    out << "sc," << direction_of(s.holonomy) << "," << s.holonomy.x << "," << s.holonomy.y << "," << s.length()
        << ",,\n";
  }
}

void write_cylinder_csv(std::ostream& out, const std::vector<Cylinder>& cyls) {
  out << "kind,theta,re,im,length,width,area\n";
  out.precision(17);
  for (const auto& c : cyls) {
    out << "cyl," << c.theta << "," << c.core.x << "," << c.core.y << "," << c.circumference << "," << c.width
        << "," << c.area << "\n";
  }
}

}  // namespace flatdio
