#include "flatdio/hdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"

namespace flatdio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fit_box_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return std::clamp(sxx > 0 ? sxy / sxx : 0.0, 0.0, 1.0);
}

double dist_to_interval(double theta, const Interval& I) {
  return std::max(0.0, direction_distance(theta, 0.5 * (I.lo + I.hi)) - 0.5 * I.length());
}

}  // namespace

const char* series_verdict_name(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::convergent:
      return "convergent";
    case SeriesVerdict::divergent:
      return "divergent";
    case SeriesVerdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

SeriesVerdict series_test(const ApproximationFunction& psi, const DimensionFunction& f, double K) {
  if (!(K > 1.0)) throw Error(ErrorKind::ConfigError, "series test needs K > 1");
  // Monotonicity of t f(psi(t)) on a log grid past the log kink at t = e.
  double prev = kInf;
  for (int i = 0; i <= 400; ++i) {
    double t = std::exp(1.0 + 0.1 * i);
    double v = t * f(psi(t));
    if (v > prev * (1.0 + 1e-12)) {
      throw Error(ErrorKind::HypothesisViolated, "t f(psi(t)) is not decreasing", t);
    }
    prev = v;
  }
  using AF = ApproximationFunction::Family;
  using DF = DimensionFunction::Family;
  const bool closed_psi = psi.family == AF::power || psi.family == AF::power_log;
  const bool closed_f = f.family == DF::power || f.family == DF::identity;
  if (closed_psi && closed_f) {
    // n f(psi(n)) = c^s n^(1 - s tau) (ln n)^(-s sigma).
    const double s = f.family == DF::identity ? 1.0 : f.s;
    const double st = s * psi.tau;
    const double ss = psi.family == AF::power_log ? s * psi.sigma : 0.0;
    if (std::abs(st - 2.0) <= 1e-12) return ss > 1.0 + 1e-12 ? SeriesVerdict::convergent : SeriesVerdict::divergent;
    return st > 2.0 ? SeriesVerdict::convergent : SeriesVerdict::divergent;
  }
  // Condensed terms K^2n f(psi(K^n)).
  std::vector<double> terms;
  double sum = 0.0;
  for (int n = 1; n <= 60; ++n) {
    double t = std::pow(K, n);
    if (!std::isfinite(t)) break;
    double term = t * t * f(psi(t));
    terms.push_back(term);
    sum += term;
  }
  if (terms.size() < 8) return SeriesVerdict::undetermined;
  const std::size_t n = terms.size();
  if (terms[n - 1] >= terms[n / 2] * (1.0 - 1e-12) && terms[n - 1] > 0.0) return SeriesVerdict::divergent;
  bool geometric = true;
  for (std::size_t i = n - 6; i + 1 < n; ++i) {
    if (!(terms[i + 1] <= 0.9 * terms[i])) geometric = false;
  }
  if (geometric || terms[n - 1] == 0.0) return SeriesVerdict::convergent;
  (void)sum;
  return SeriesVerdict::undetermined;
}

// ---------------------------------------------------------------------------
// Cantor structures

double CantorStructure::mass(const Interval& J) const {
  const auto& L = leaves();
  const auto& mu = masses.back();
  auto it = std::lower_bound(L.intervals.begin(), L.intervals.end(), J.lo,
                             [](const Interval& a, double v) { return a.hi < v; });
  double total = 0.0;
  for (; it != L.intervals.end() && it->lo <= J.hi; ++it) {
    double lo = std::max(it->lo, J.lo), hi = std::min(it->hi, J.hi);
    if (hi <= lo) continue;
    std::size_t i = static_cast<std::size_t>(it - L.intervals.begin());
    total += mu[i] * (hi - lo) / it->length();
  }
  return total;
}

bool CantorStructure::well_formed() const {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& F = levels[k];
    for (std::size_t i = 0; i < F.intervals.size(); ++i) {
      const auto& I = F.intervals[i];
      if (!(I.length() > 0.0)) return false;
      if (i > 0 && I.lo < F.intervals[i - 1].hi - 1e-15) return false;
      if (k > 0) {
        int p = F.parent[i];
        if (p < 0 || p >= static_cast<int>(levels[k - 1].intervals.size())) return false;
        const auto& P = levels[k - 1].intervals[p];
        if (I.lo < P.lo - 1e-15 || I.hi > P.hi + 1e-15) return false;
      }
    }
  }
  return true;
}

double CantorStructure::mass_defect() const {
  double worst = 0.0;
  double total = 0.0;
  for (double m : masses.front()) total += m;
  worst = std::abs(total - 1.0);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    std::vector<double> sums(levels[k - 1].intervals.size(), 0.0);
    for (std::size_t i = 0; i < levels[k].intervals.size(); ++i) sums[levels[k].parent[i]] += masses[k][i];
    for (std::size_t p = 0; p < sums.size(); ++p) worst = std::max(worst, std::abs(sums[p] - masses[k - 1][p]));
  }
  return worst;
}

CantorStructure mass_distribution(std::vector<IntervalFamily> levels, const DimensionFunction& f) {
  if (levels.empty()) throw Error(ErrorKind::EmptyLevel, "no levels");
  CantorStructure C;
  C.levels = std::move(levels);
  C.masses.resize(C.levels.size());
  for (std::size_t k = 0; k < C.levels.size(); ++k) {
    auto& F = C.levels[k];
    if (F.intervals.empty()) throw Error(ErrorKind::EmptyLevel, "empty level " + std::to_string(k));
    if (F.parent.size() != F.intervals.size()) F.parent.assign(F.intervals.size(), k == 0 ? -1 : 0);
    const std::size_t np = k == 0 ? 1 : C.levels[k - 1].intervals.size();
    std::vector<double> fsum(np, 0.0);
    auto pid = [&](std::size_t i) { return k == 0 ? std::size_t{0} : static_cast<std::size_t>(F.parent[i]); };
    for (std::size_t i = 0; i < F.intervals.size(); ++i) fsum[pid(i)] += f(F.intervals[i].length());
    if (k > 0) {
      for (std::size_t p = 0; p < np; ++p) {
        if (!(fsum[p] > 0.0)) {
          throw Error(ErrorKind::EmptyLevel, "node without children at level " + std::to_string(k - 1));
        }
      }
    }
    C.masses[k].resize(F.intervals.size());
    for (std::size_t i = 0; i < F.intervals.size(); ++i) {
      double pm = k == 0 ? 1.0 : C.masses[k - 1][pid(i)];
      C.masses[k][i] = f(F.intervals[i].length()) / fsum[pid(i)] * pm;
    }
  }
  return C;
}

TransferenceResult mass_transference_check(const CantorStructure& C, const DimensionFunction& f, double eta,
                                           double rho0, std::size_t samples, std::uint64_t seed) {
  TransferenceResult res;
  auto test = [&](const Interval& J, double mu) {
    ++res.checked;
    double bound = f(J.length()) / eta;
    double ratio = mu / bound;
    if (ratio > res.max_ratio) res.max_ratio = ratio;
    if (mu > bound * (1.0 + 1e-12) && res.pass) {
      res.pass = false;
      res.witness = J;
      res.witness_mass = mu;
      res.witness_bound = bound;
    }
  };
  for (std::size_t k = 0; k < C.levels.size(); ++k) {
    for (std::size_t i = 0; i < C.levels[k].intervals.size(); ++i) test(C.levels[k].intervals[i], C.masses[k][i]);
  }
  const auto& L = C.leaves().intervals;
  if (samples == 0 || L.empty()) return res;
  double min_len = kInf;
  for (const auto& I : L) min_len = std::min(min_len, I.length());
  const double lo_len = std::max(min_len * 1e-3, 1e-300);
  const double hi_len = std::max(rho0, lo_len);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  std::vector<Interval> Js(samples);
  for (auto& J : Js) {
    const Interval& leaf = L[static_cast<std::size_t>(U01(rng) * L.size()) % L.size()];
    double c = leaf.lo + U01(rng) * leaf.length();
    double len = std::exp(std::log(lo_len) + U01(rng) * (std::log(hi_len) - std::log(lo_len)));
    J = {c - 0.5 * len, c + 0.5 * len};
  }
  std::vector<double> mus(samples);
  parallel_for(samples, 0, [&](std::size_t i) { mus[i] = C.mass(Js[i]); });
  for (std::size_t i = 0; i < samples; ++i) test(Js[i], mus[i]);
  return res;
}

nlohmann::json DimensionEstimate::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["value"] = value;
  j["params"] = params;
  j["diagnostics"] = diagnostics;
  j["level_counts"] = level_counts;
  j["notes"] = notes;
  return j;
}

// ---------------------------------------------------------------------------
// Covering upper bound

UpperCoverResult jarnik_upper_cover(const RecordSource& src, const UpperCoverParams& p) {
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw Error(ErrorKind::ConfigError, "upper cover needs 0 < eps < 1");
  if (p.depth < 1 || p.window == 0) throw Error(ErrorKind::ConfigError, "upper cover needs depth >= 1 and a window");
  const double m = p.m;
  const double e2 = p.eps * p.eps;
  double U = p.U > 0.0 ? p.U : 12.0 / (m * m * e2);
  const double tau = p.tau > 0.0 ? p.tau : m * e2 / std::sqrt(48.0);
  UpperCoverResult res;
  const double K = std::ceil(4.0 * U / e2 - 1e-9);
  U = K * e2 / 4.0;
  res.K = K;
  const double logK = std::log(K);
  auto L_at = [&](int n) { return p.eps * std::exp(0.5 * (n * logK - std::log(2.0 * kPi))); };
  int N = 1;
  while (L_at(N) < p.L0) ++N;
  res.N = N;
  const double lenN = kPi * std::exp(-N * logK);
  const double cellsN = std::floor(std::exp(N * logK) + 0.5);

  // Window of level-N parents around the center.
  double i0 = std::floor((canonical_direction(p.center) + kHalfPi) / lenN);
  double first = std::max(0.0, i0 - static_cast<double>(p.window / 2));
  double last = std::min(cellsN, first + static_cast<double>(p.window));
  first = std::max(0.0, last - static_cast<double>(p.window));
  std::vector<Interval> parents;
  for (double i = first; i < last; i += 1.0) parents.push_back({-kHalfPi + i * lenN, -kHalfPi + (i + 1.0) * lenN});
  const Interval win{parents.front().lo, parents.back().hi};

  double tau_fit = 1.0;
  std::vector<Interval> current = parents;
  res.parents.push_back(static_cast<double>(parents.size()));
  for (int step = 1; step <= p.depth; ++step) {
    const int n = N + step;
    const bool final_level = step == p.depth;
    const double Ln = L_at(n);
    if (!final_level && static_cast<double>(current.size()) * K > static_cast<double>(p.budget)) {
      throw Error(ErrorKind::DepthInfeasible, "covering level exceeds the interval budget",
                  static_cast<double>(current.size()) * K);
    }
    auto rad = [&](double l) { return e2 / (2.0 * l * l); };
    auto recs = records_near(src, 0.5 * (win.lo + win.hi), 0.5 * win.length(), Ln, rad);
    std::vector<Interval> raw;
    raw.reserve(recs.size());
    for (const auto& r : recs) {
      for (auto b : circle_ball(r.theta, rad(r.l))) raw.push_back(b);
    }
    std::vector<Interval> pieces = merge_intervals(raw);
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

    std::vector<double> pruned(current.size(), 0.0);
    std::vector<std::vector<Interval>> next(final_level ? 0 : current.size());
    std::vector<char> disjoint_ok(current.size(), 1), covered_ok(current.size(), 1);
    parallel_for(current.size(), 0, [&](std::size_t pi) {
      const Interval P = current[pi];
      const double cw = P.length() / K;
      // Child index ranges [a, b] meeting the closed union.
      std::vector<std::pair<double, double>> ranges;
      auto it = std::lower_bound(pieces.begin(), pieces.end(), P.lo,
                                 [](const Interval& a, double v) { return a.hi < v; });
      for (; it != pieces.end() && it->lo <= P.hi; ++it) {
        double a = std::max(0.0, std::ceil((it->lo - P.lo) / cw) - 1.0);
        double b = std::min(K - 1.0, std::floor((it->hi - P.lo) / cw));
        if (b >= a) ranges.push_back({a, b});
      }
      double count = 0.0, prev_end = -1.0;
      for (auto [a, b] : ranges) {
        double s = std::max(a, prev_end + 1.0);
        if (b >= s) count += b - s + 1.0;
        prev_end = std::max(prev_end, b);
      }
      pruned[pi] = count;
      // Spot checks against the raw balls: a few survivors and pruned children.
      std::vector<ResonantRecord> local;
      auto meets = [&](const Interval& I, double scale) {
        for (const auto& r : local) {
          if (dist_to_interval(r.theta, I) <= scale * rad(r.l)) return true;
        }
        return false;
      };
      if (pi % std::max<std::size_t>(1, current.size() / 16) == 0) {
        for (const auto& r : recs) {
          if (dist_to_interval(r.theta, P) <= 2.0 * rad(r.l)) local.push_back(r);
        }
        std::vector<double> probes;
        for (int k = 0; k < 64; ++k) probes.push_back(std::floor((K - 1.0) * k / 63.0));
        for (auto [a, b] : ranges) probes.push_back(a);
        for (double idx : probes) {
          Interval I{P.lo + idx * cw, P.lo + (idx + 1.0) * cw};
          bool is_pruned = false;
          for (auto [a, b] : ranges) is_pruned |= idx >= a && idx <= b;
          // 1e-9 slack on the closed test absorbs rounding of the index map.
          if (is_pruned) {
            if (!meets({I.lo - 1e-9 * cw, I.hi + 1e-9 * cw}, 2.0)) covered_ok[pi] = 0;
          } else if (meets({I.lo + 1e-9 * cw, I.hi - 1e-9 * cw}, 1.0)) {
            disjoint_ok[pi] = 0;
          }
        }
      }
      if (!final_level) {
        std::size_t ri = 0;
        for (double idx = 0.0; idx < K; idx += 1.0) {
          while (ri < ranges.size() && ranges[ri].second < idx) ++ri;
          if (ri < ranges.size() && idx >= ranges[ri].first) continue;
          next[pi].push_back({P.lo + idx * cw, P.lo + (idx + 1.0) * cw});
        }
      }
    });
    double survivors = 0.0;
    for (std::size_t pi = 0; pi < current.size(); ++pi) {
      tau_fit = std::min(tau_fit, pruned[pi] / K);
      survivors += K - pruned[pi];
      res.survivors_disjoint &= disjoint_ok[pi] != 0;
      res.pruned_covered &= covered_ok[pi] != 0;
    }
    res.survivors.push_back(survivors);
    res.estimate.level_counts.push_back(survivors);
    if (!final_level) {
      std::vector<Interval> flat;
      for (auto& v : next) flat.insert(flat.end(), v.begin(), v.end());
      current = std::move(flat);
      res.parents.push_back(static_cast<double>(current.size()));
      if (current.empty()) break;
    }
  }
  res.tau_fit = tau_fit;
  auto& E = res.estimate;
  E.kind = "upper_cover";
  E.value = tau_fit >= 1.0 ? 0.0 : std::clamp(1.0 - std::abs(std::log(1.0 - tau_fit)) / logK, 0.0, 1.0);
  E.params = {{"eps", p.eps}, {"U", U}, {"tau", tau}, {"K", K}, {"N", N}, {"depth", p.depth},
              {"window", static_cast<double>(p.window)}, {"L_final", L_at(N + p.depth)}};
  auto theorem = [&](double denom) {
    if (tau <= 0.0) return 1.0;
    return 1.0 - std::abs(std::log(1.0 - tau)) / std::abs(std::log(e2 / denom));
  };
  E.diagnostics["tau_fit"] = tau_fit;
  E.diagnostics["theorem_8U"] = theorem(8.0 * U);
  E.diagnostics["theorem_5U"] = theorem(5.0 * U);
  E.diagnostics["survivors_disjoint"] = res.survivors_disjoint ? 1.0 : 0.0;
  E.diagnostics["pruned_covered"] = res.pruned_covered ? 1.0 : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// Cantor lower bound

bool leaves_avoid_balls(const CantorStructure& C, const RecordSource& src, double eps, double L) {
  const double e3 = eps * eps * eps;
  const auto& leaves = C.leaves().intervals;
  std::vector<char> ok(leaves.size(), 1);
  parallel_for(leaves.size(), 0, [&](std::size_t i) {
    const Interval& I = leaves[i];
    auto rad = [&](double l) { return e3 / (l * l); };
    for (const auto& r : records_near(src, 0.5 * (I.lo + I.hi), 0.5 * I.length(), L, rad)) {
      if (dist_to_interval(r.theta, I) <= rad(r.l) * (1.0 - 1e-9)) {
        ok[i] = 0;
        return;
      }
    }
  });
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

LowerCantorResult jarnik_lower_cantor(const RecordSource& src, const LowerCantorParams& p) {
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw Error(ErrorKind::ConfigError, "lower Cantor needs 0 < eps < 1");
  if (p.depth < 2) throw Error(ErrorKind::ConfigError, "lower Cantor needs depth >= 2");
  if (p.tau > 0.0 && !(p.tau < 1.0 - p.eps * p.eps)) {
    throw Error(ErrorKind::ConfigError, "lower Cantor needs tau < 1 - eps^2");
  }
  LowerCantorResult res;
  const double K = 1.0 / p.eps, e2 = p.eps * p.eps;
  res.K = K;
  const int nchild = static_cast<int>(std::floor(K * K + 1e-9));
  if (std::pow(static_cast<double>(nchild), p.depth - 1) > static_cast<double>(p.budget)) {
    throw Error(ErrorKind::DepthInfeasible, "Cantor depth exceeds the interval budget",
                std::pow(static_cast<double>(nchild), p.depth - 1));
  }

  // I0: level-1 interval nearest to the center that meets no ball of R(K, 0).
  const double len1 = 1.0 / (K * K);
  Interval I0{};
  bool found = false;
  const int reach = static_cast<int>(std::ceil(kPi / len1));
  for (int k = 0; k <= reach && !found; ++k) {
    for (int sgn : {1, -1}) {
      if (k == 0 && sgn < 0) continue;
      double c = p.center + sgn * k * len1;
      Interval I{c - 0.5 * len1, c + 0.5 * len1};
      if (I.lo < -kHalfPi || I.hi > kHalfPi) continue;
      if (decaying_admissible(src, I, p.eps, 1)) {
        I0 = I;
        found = true;
        break;
      }
    }
  }
  if (!found) throw Error(ErrorKind::NoAdmissibleInterval, "no admissible first-level interval");
  if (std::abs(0.5 * (I0.lo + I0.hi) - p.center) > 0.5 * len1) {
    res.estimate.notes.push_back("I0 shifted away from the requested center");
  }

  std::vector<IntervalFamily> levels(1);
  levels[0].level = 1;
  levels[0].intervals = {I0};
  levels[0].parent = {-1};
  double c_min = kInf;
  std::vector<double> child_counts_min;
  for (int n = 1; n < p.depth; ++n) {
    const auto& parents = levels.back().intervals;
    const double Kn = std::pow(K, n);
    const double max_rad = e2 / (std::pow(K, n - 1) * Kn);
    std::vector<std::vector<Interval>> kids(parents.size());
    parallel_for(parents.size(), 0, [&](std::size_t pi) {
      const Interval P = parents[pi];
      const double cl = e2 * P.length();
      std::vector<Interval> balls;
      for (const auto& r : src(0.5 * (P.lo + P.hi), std::min(kHalfPi, 0.5 * P.length() + max_rad), Kn)) {
        if (r.l <= Kn / K || r.l > Kn) continue;
        for (auto b : circle_ball(r.theta, e2 / (r.l * Kn))) balls.push_back(b);
      }
      balls = merge_intervals(std::move(balls));
      for (int i = 0; i < nchild; ++i) {
        Interval I{P.lo + i * cl, P.lo + (i + 1) * cl};
        bool hit = false;
        auto it = std::lower_bound(balls.begin(), balls.end(), I.lo,
                                   [](const Interval& a, double v) { return a.hi < v; });
        if (it != balls.end() && it->lo <= I.hi) hit = true;
        if (!hit) kids[pi].push_back(I);
      }
    });
    IntervalFamily F;
    F.level = n + 1;
    double level_min = kInf;
    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
      if (kids[pi].empty()) {
        throw Error(ErrorKind::ExtinctBranch,
                    "interval [" + std::to_string(parents[pi].lo) + ", " + std::to_string(parents[pi].hi) +
                        "] has no admissible child",
                    parents[pi].lo);
      }
      level_min = std::min(level_min, static_cast<double>(kids[pi].size()));
      for (const auto& I : kids[pi]) {
        F.intervals.push_back(I);
        F.parent.push_back(static_cast<int>(pi));
      }
    }
    child_counts_min.push_back(level_min);
    c_min = std::min(c_min, level_min);
    levels.push_back(std::move(F));
  }

  res.c_min = c_min;
  res.s = c_min > 1.0 ? std::min(1.0, std::log(c_min) / (2.0 * std::log(K))) : 0.0;
  const DimensionFunction fs = res.s > 0.0 ? DimensionFunction::power(res.s) : DimensionFunction::identity();
  res.structure = mass_distribution(std::move(levels), fs);
  res.eta = res.s > 0.0 ? 1.0 / (2.0 * std::pow(K, 4.0 * res.s)) : 0.0;
  res.eta_stored = kInf;
  if (res.s > 0.0) {
    for (std::size_t k = 0; k < res.structure.levels.size(); ++k) {
      for (std::size_t i = 0; i < res.structure.levels[k].intervals.size(); ++i) {
        res.eta_stored = std::min(res.eta_stored,
                                  fs(res.structure.levels[k].intervals[i].length()) / res.structure.masses[k][i]);
      }
    }
  }
  res.leaves_avoid = leaves_avoid_balls(res.structure, src, p.eps, std::pow(K, p.depth - 1));

  auto& E = res.estimate;
  E.kind = "lower_cantor";
  E.value = res.s;
  E.params = {{"eps", p.eps}, {"K", K}, {"depth", p.depth}, {"children", nchild}, {"tau", p.tau}};
  E.diagnostics["c_min"] = c_min;
  E.diagnostics["eta"] = res.eta;
  E.diagnostics["eta_stored"] = res.eta_stored;
  E.diagnostics["I0_lo"] = I0.lo;
  E.diagnostics["I0_hi"] = I0.hi;
  E.diagnostics["leaves_avoid"] = res.leaves_avoid ? 1.0 : 0.0;
  if (p.tau > 0.0) {
    E.diagnostics["theorem"] = 1.0 - std::abs(std::log(1.0 - p.tau - e2)) / (2.0 * std::abs(std::log(p.eps)));
  }
  for (const auto& F : res.structure.levels) E.level_counts.push_back(static_cast<double>(F.intervals.size()));
  for (std::size_t i = 0; i < child_counts_min.size(); ++i) {
    E.diagnostics["min_children_level" + std::to_string(i + 1)] = child_counts_min[i];
  }
  return res;
}

// ---------------------------------------------------------------------------
// Box counting

DimensionEstimate box_dimension(const std::function<bool(double)>& member, const std::vector<double>& scales,
                                Interval domain, int oversample) {
  std::vector<double> sc;
  for (double s : scales) {
    if (s > 0.0) sc.push_back(s);
  }
  std::sort(sc.begin(), sc.end());
  sc.erase(std::unique(sc.begin(), sc.end()), sc.end());
  if (sc.size() < 3) throw Error(ErrorKind::DegenerateFit, "box counting needs at least 3 distinct scales");
  if (!(domain.length() > 0.0) || oversample < 1) throw Error(ErrorKind::ConfigError, "invalid box-count domain");
  const double h = sc.front() / oversample;
  const auto npts = static_cast<std::size_t>(std::floor(domain.length() / h)) + 1;
  if (npts > 200000000) throw Error(ErrorKind::BudgetExceeded, "box-count grid too fine", static_cast<double>(npts));
  std::vector<char> in(npts, 0);
  parallel_for((npts + 4095) / 4096, 0, [&](std::size_t blk) {
    for (std::size_t i = blk * 4096; i < std::min(npts, (blk + 1) * 4096); ++i) {
      double x = domain.lo + static_cast<double>(i) * h;
      if (x <= domain.hi) in[i] = member(x) ? 1 : 0;
    }
  });
  DimensionEstimate E;
  E.kind = "box_count";
  std::vector<double> xs, ys;
  for (double d : sc) {
    std::set<long long> cells;
    for (std::size_t i = 0; i < npts; ++i) {
      if (!in[i]) continue;
      double x = static_cast<double>(i) * h;
      cells.insert(static_cast<long long>(std::floor(x / d + 1e-9)));
    }
    E.level_counts.push_back(static_cast<double>(cells.size()));
    E.diagnostics["N(" + std::to_string(d) + ")"] = static_cast<double>(cells.size());
    if (!cells.empty()) {
      xs.push_back(std::log(1.0 / d));
      ys.push_back(std::log(static_cast<double>(cells.size())));
    }
  }
  E.value = fit_box_slope(xs, ys);
  E.params = {{"scales", static_cast<double>(sc.size())}, {"oversample", oversample}};
  return E;
}

DimensionEstimate box_dimension_points(const std::vector<double>& points, const std::vector<double>& scales,
                                       Interval domain) {
  std::vector<double> sc;
  for (double s : scales) {
    if (s > 0.0) sc.push_back(s);
  }
  std::sort(sc.begin(), sc.end());
  sc.erase(std::unique(sc.begin(), sc.end()), sc.end());
  if (sc.size() < 3) throw Error(ErrorKind::DegenerateFit, "box counting needs at least 3 distinct scales");
  DimensionEstimate E;
  E.kind = "box_count";
  if (points.empty()) E.notes.push_back("empty set");
  std::vector<double> xs, ys;
  for (double d : sc) {
    std::set<long long> cells;
    for (double x : points) cells.insert(static_cast<long long>(std::floor((x - domain.lo) / d + 1e-9)));
    E.level_counts.push_back(static_cast<double>(cells.size()));
    E.diagnostics["N(" + std::to_string(d) + ")"] = static_cast<double>(cells.size());
    if (!cells.empty()) {
      xs.push_back(std::log(1.0 / d));
      ys.push_back(std::log(static_cast<double>(cells.size())));
    }
  }
  E.value = fit_box_slope(xs, ys);
  E.params = {{"scales", static_cast<double>(sc.size())}, {"points", static_cast<double>(points.size())}};
  return E;
}

}  // namespace flatdio
