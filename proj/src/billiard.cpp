#include "flatdio/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <tuple>

#include "flatdio/cf.hpp"
#include "flatdio/dynamics.hpp"
#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"
#include "flatdio/scan.hpp"

namespace flatdio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_triangle(const Triangle& T, Vec2 p, double tol) {
  for (int k = 0; k < 3; ++k) {
    Vec2 e = T.v[(k + 1) % 3] - T.v[k];
    if (cross(e, p - T.v[k]) < -tol * e.norm()) return false;
  }
  return true;
}

// Walks the orbit for `len` time units, calling seg(tri, a, b, t_a) for each
// chart piece until it returns true. Returns the end state.
template <typename Seg>
FlowState walk(const TranslationSurface& X, FlowState s, double len, Seg&& seg, bool& stopped) {
  const auto& tris = X.triangles();
  const Vec2 d = direction_vector(s.theta);
  const double tol = 1e-12 * X.diameter();
  double left = len;
  stopped = false;
  for (std::size_t guard = 0;; ++guard) {
    if (guard > 2000000000ULL) throw Error(ErrorKind::BudgetExceeded, "flow step limit reached");
    const Triangle& T = tris[s.tri];
    double best = std::numeric_limits<double>::infinity();
    int exit = -1;
    for (int k = 0; k < 3; ++k) {
      Vec2 e = T.v[(k + 1) % 3] - T.v[k];
      Vec2 n{e.y, -e.x};  // outward for counterclockwise triangles
      double nd = dot(n, d);
      if (nd <= 0.0) continue;
      double sk = std::max(0.0, dot(n, T.v[k] - s.p) / nd);
      if (sk < best) {
        best = sk;
        exit = k;
      }
    }
    if (exit < 0) throw Error(ErrorKind::DegenerateDirection, "no exit side");
    if (best >= left) {
      Vec2 b = s.p + d * left;
      if (seg(s.tri, s.p, b, s.time)) {
        stopped = true;
        return s;
      }
      s.p = b;
      s.time += left;
      return s;
    }
    Vec2 q = s.p + d * best;
    if (seg(s.tri, s.p, q, s.time)) {
      stopped = true;
      return s;
    }
    Vec2 e = T.v[(exit + 1) % 3] - T.v[exit];
    double r = dot(q - T.v[exit], e) / e.norm2();
    double en = e.norm();
    if (r * en < tol || (1.0 - r) * en < tol) {
      throw Error(ErrorKind::HitsSingularity, "orbit reaches a vertex", s.time + best);
    }
    s.p = q + T.shift[exit];
    s.time += best;
    s.tri = T.nb_tri[exit];
    left -= best;
  }
}

struct Developed {
  int tri;
  Vec2 D;  // developed = chart + D
};

// Triangles meeting the developed disk B(p, rho), reached through sides that
// meet it.
std::vector<Developed> develop_disk(const TranslationSurface& X, const FlowState& s, double rho) {
  const auto& tris = X.triangles();
  std::vector<Developed> out{{s.tri, {0.0, 0.0}}};
  std::map<std::tuple<int, long long, long long>, bool> seen;
  auto key = [&](const Developed& d) {
    double q = 1e-9 * X.diameter();
    return std::make_tuple(d.tri, std::llround(d.D.x / q), std::llround(d.D.y / q));
  };
  seen[key(out[0])] = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.size() > 100000) throw Error(ErrorKind::BudgetExceeded, "disk development too large");
    Developed cur = out[i];
    const Triangle& T = tris[cur.tri];
    for (int k = 0; k < 3; ++k) {
      Vec2 a = T.v[k] + cur.D, b = T.v[(k + 1) % 3] + cur.D;
      Vec2 ab = b - a;
      double t = std::clamp(dot(s.p - a, ab) / ab.norm2(), 0.0, 1.0);
      if ((a + ab * t - s.p).norm() >= rho) continue;
      Developed nx{T.nb_tri[k], cur.D - T.shift[k]};
      auto kk = key(nx);
      if (seen.count(kk)) continue;
      seen[kk] = true;
      out.push_back(nx);
    }
  }
  return out;
}

double tail_min_ratio(const std::vector<RecurrenceRecord>& pts, double& slope) {
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    if (p.censored) continue;
    xs.push_back(-std::log(p.r));
    ys.push_back(std::log(p.R));
  }
  slope = kNaN;
  if (xs.empty()) return kNaN;
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= xs.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    slope = sxx > 0 ? sxy / sxx : kNaN;
  }
  double w = std::numeric_limits<double>::infinity();
  for (std::size_t i = xs.size() / 2; i < xs.size(); ++i) w = std::min(w, ys[i] / xs[i]);
  return w;
}

FlowState random_state(const TranslationSurface& X, std::mt19937_64& rng, double theta) {
  const auto& tris = X.triangles();
  std::vector<double> w;
  for (const auto& t : tris) w.push_back(0.5 * cross(t.v[1] - t.v[0], t.v[2] - t.v[0]));
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int k = pick(rng);
  double a = U(rng), b = U(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  const Triangle& T = tris[k];
  FlowState s;
  s.tri = k;
  s.p = T.v[0] + (T.v[1] - T.v[0]) * a + (T.v[2] - T.v[0]) * b;
  s.theta = theta;
  return s;
}

}  // namespace

FlowState locate(const TranslationSurface& X, int polygon, Vec2 p, double theta) {
  const auto& tris = X.triangles();
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (tris[i].polygon == polygon && in_triangle(tris[i], p, 1e-12 * X.diameter())) {
      return {static_cast<int>(i), p, theta, 0.0};
    }
  }
  throw Error(ErrorKind::ConfigError, "point is not inside polygon " + std::to_string(polygon));
}

FlowState start_state(const TranslationSurface& X, double theta) {
  const Triangle& T = X.triangles()[0];
  return {0, (T.v[0] + T.v[1] + T.v[2]) * (1.0 / 3.0), theta, 0.0};
}

Vec2 polygon_point(const TranslationSurface&, const FlowState& s) { return s.p; }

FlowState flow(const TranslationSurface& X, const FlowState& s, double dt) {
  bool stopped = false;
  auto none = [](int, Vec2, Vec2, double) { return false; };
  if (dt >= 0.0) return walk(X, s, dt, none, stopped);
  FlowState r = s;
  r.theta = s.theta + kPi;
  r.time = 0.0;
  r = walk(X, r, -dt, none, stopped);
  r.theta = s.theta;
  r.time = s.time + dt;
  return r;
}

double injectivity_radius(const TranslationSurface& X, const FlowState& s) {
  const double half_sys = 0.5 * systole(X);
  double best = half_sys;
  for (const auto& d : develop_disk(X, s, half_sys)) {
    for (const auto& v : X.triangles()[d.tri].v) best = std::min(best, (v + d.D - s.p).norm());
  }
  return best;
}

RecurrenceRecord return_time(const TranslationSurface& X, const FlowState& s, double r, double t_budget) {
  if (!(r > 0.0)) throw Error(ErrorKind::ConfigError, "radius must be positive", r);
  double inj = injectivity_radius(X, s);
  if (r >= 0.5 * inj) throw Error(ErrorKind::RadiusTooLarge, "radius not below half the injectivity radius", inj);
  std::vector<std::vector<Vec2>> centers(X.triangles().size());
  for (const auto& d : develop_disk(X, s, r)) centers[d.tri].push_back(s.p - d.D);
  const Vec2 dir = direction_vector(s.theta);
  RecurrenceRecord rec;
  rec.r = r;
  FlowState start = s;
  start.time = 0.0;
  double found = -1.0;
  auto seg = [&](int tri, Vec2 a, Vec2 b, double ta) {
    double len = (b - a).norm();
    double best = std::numeric_limits<double>::infinity();
    for (Vec2 c : centers[tri]) {
      Vec2 f = a - c;
      double B = dot(f, dir), C = f.norm2() - r * r;
      double disc = B * B - C;
      if (disc <= 0.0) continue;
      double sq = std::sqrt(disc);
      double s1 = -B - sq, s2 = -B + sq;
      if (s2 < 0.0 || s1 > len) continue;
      double t_in = ta + std::max(s1, 0.0), t_out = ta + std::min(s2, len);
      // The departure from the disk ends at t = r.
      if (t_out <= r * (1.0 + 1e-9) + 1e-12) continue;
      best = std::min(best, std::max(t_in, r));
    }
    if (best < std::numeric_limits<double>::infinity()) {
      found = best;
      return true;
    }
    return false;
  };
  bool stopped = false;
  walk(X, start, t_budget, seg, stopped);
  if (stopped) {
    rec.R = found;
  } else {
    rec.R = t_budget;
    rec.censored = true;
  }
  return rec;
}

std::vector<double> default_radii(const TranslationSurface& X, const FlowState& s, double r_min) {
  double lim = 0.5 * injectivity_radius(X, s);
  std::vector<double> out;
  for (int k = 1; k < 200; ++k) {
    double r = std::ldexp(1.0, -k);
    if (r < r_min) break;
    if (r < lim) out.push_back(r);
  }
  return out;
}

RecurrenceEstimate recurrence_rate(const TranslationSurface& X, const FlowState& s,
                                   const std::vector<double>& radii, double t_budget, bool push_check) {
  RecurrenceEstimate E;
  for (double r : radii) {
    auto rec = return_time(X, s, r, t_budget);
    if (rec.censored) ++E.censored;
    E.points.push_back(rec);
  }
  if (E.censored > 0) E.notes.push_back(std::to_string(E.censored) + " censored radii excluded");
  E.omega = tail_min_ratio(E.points, E.slope);
  E.omega_pushed = kNaN;
  E.invariance_gap = kNaN;
  if (push_check) {
    try {
      FlowState q = flow(X, s, 1.0);
      q.time = 0.0;
      std::vector<RecurrenceRecord> pts;
      double lim = 0.5 * injectivity_radius(X, q);
      for (double r : radii) {
        if (r < lim) pts.push_back(return_time(X, q, r, t_budget));
      }
      double slope = 0.0;
      E.omega_pushed = tail_min_ratio(pts, slope);
      E.invariance_gap = std::abs(E.omega_pushed - E.omega);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HitsSingularity) throw;
      E.notes.push_back("pushed point hits a vertex; invariance check skipped");
    }
  }
  return E;
}

BridgeReport recurrence_diophantine_bridge(const TranslationSurface& X, const RecordSource& src, double theta,
                                           double eta, double L, std::size_t samples, std::uint64_t seed,
                                           double t_budget) {
  if (!(eta > 1.0)) throw Error(ErrorKind::ConfigError, "bridge needs eta > 1", eta);
  BridgeReport B;
  B.theta = theta;
  B.eta = eta;
  B.threshold = 1.0 / (eta - 1.0);
  const double th = canonical_direction(theta);
  auto count = [&](double tau, double& last) {
    auto psi = ApproximationFunction::power(tau);
    std::size_t n = 0;
    for (const auto& r : records_near(src, th, 0.0, L, [&](double l) { return std::min(kHalfPi, psi(l)); })) {
      double dist = direction_distance(th, r.theta);
      if (dist <= 1e-13) throw Error(ErrorKind::ResonantDirection, "direction is resonant at this truncation", theta);
      if (r.l > std::sqrt(L) && dist <= psi(r.l)) {
        ++n;
        last = std::max(last, r.l);
      }
    }
    return n;
  };
  double unused = 0.0;
  B.solutions = count(eta, B.last_solution);
  B.solutions_below = eta - 0.1 >= 1.0 ? count(eta - 0.1, unused) : 0;
  const bool member = B.solutions > 0;

  std::mt19937_64 rng(seed);
  std::vector<FlowState> starts;
  for (std::size_t i = 0; i < samples; ++i) starts.push_back(random_state(X, rng, theta));
  B.omegas.assign(samples, kNaN);
  parallel_for(samples, 0, [&](std::size_t i) {
    try {
      auto E = recurrence_rate(X, starts[i], default_radii(X, starts[i]), t_budget, false);
      B.omegas[i] = E.omega;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HitsSingularity) throw;
    }
  });
  std::vector<double> ok;
  for (double w : B.omegas) {
    if (std::isnan(w)) continue;
    ok.push_back(w);
    bool below = w < B.threshold;
    ++B.agreement[below ? 0 : 1][member ? 0 : 1];
    if (below && !member) B.consistent = false;
  }
  B.q25 = quantile(ok, 0.25);
  B.median = quantile(ok, 0.5);
  B.q75 = quantile(ok, 0.75);
  return B;
}

STauTable s_tau_experiment(const TranslationSurface& X, double tau, std::size_t n_samples, std::uint64_t seed,
                           double t_budget, double tol, double r_min) {
  if (tau < 2.0 || tau > 6.0) throw Error(ErrorKind::ConfigError, "S_tau experiment needs 2 <= tau <= 6", tau);
  STauTable S;
  S.tau = tau;
  S.target = 1.0 / (tau - 1.0);
  S.reference = 2.0 / tau;
  std::mt19937_64 rng(seed);
  std::vector<double> thetas;
  if (tau <= 2.0 + 1e-12) {
    std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
    for (std::size_t i = 0; i < n_samples; ++i) thetas.push_back(U(rng));
  } else {
    std::uniform_int_distribution<int> A(1, 9);
    for (std::size_t i = 0; i < n_samples; ++i) {
      std::vector<double> prefix{static_cast<double>(A(rng)), static_cast<double>(A(rng))};
      thetas.push_back(direction_of_slope(cf_value(designed_quotients(prefix, tau, 1e7))));
    }
  }
  S.rows.resize(thetas.size());
  parallel_for(thetas.size(), 0, [&](std::size_t i) {
    STauRow row;
    row.theta = thetas[i];
    row.omega = kNaN;
    try {
      FlowState s = start_state(X, thetas[i]);
      row.omega = recurrence_rate(X, s, default_radii(X, s, r_min), t_budget, false).omega;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HitsSingularity) throw;
    }
    row.pass = !std::isnan(row.omega) && std::abs(row.omega - S.target) < tol;
    S.rows[i] = row;
  });
  std::vector<double> omegas, passing;
  for (const auto& r : S.rows) {
    if (!std::isnan(r.omega)) omegas.push_back(r.omega);
    if (r.pass) passing.push_back(r.theta);
  }
  S.pass_fraction = S.rows.empty() ? 0.0 : static_cast<double>(passing.size()) / static_cast<double>(S.rows.size());
  S.median_omega = quantile(omegas, 0.5);
  S.dimension = box_dimension_points(passing, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
  return S;
}

}  // namespace flatdio
