#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "flatdio/errors.hpp"
#include "flatdio/hdim.hpp"
#include "flatdio/parallel.hpp"

namespace flatdio {

std::vector<double> greedy_separated(const std::vector<double>& points, double sep) {
  std::vector<double> out;
  std::set<double> taken;
  for (double x : points) {
    auto it = taken.lower_bound(x);
    if (it != taken.end() && *it - x <= sep) continue;
    if (it != taken.begin() && x - *std::prev(it) <= sep) continue;
    taken.insert(x);
    out.push_back(x);
  }
  return out;
}

namespace {

struct NodeOutput {
  std::vector<Interval> balls;
  KhinchinNode info;
  bool extinct = false;
};

bool overlaps_sorted(const std::vector<Interval>& sorted, const Interval& I) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), I.lo, [](const Interval& a, double v) { return a.hi < v; });
  return it != sorted.end() && it->lo <= I.hi;
}

void insert_sorted(std::vector<Interval>& sorted, const Interval& I) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), I.lo, [](const Interval& a, double v) { return a.lo < v; });
  sorted.insert(it, I);
}

NodeOutput build_node(const RecordSource& src, const ApproximationFunction& psi, const DimensionFunction& f,
                      const KhinchinConstants& k, double delta, const Interval& B0, double mu0) {
  NodeOutput out;
  auto& info = out.info;
  info.C = k.eta * mu0;
  const double len0 = B0.length();

  // m(B0): smallest l meeting the length condition and f(r)/r > C / (delta |B0|).
  // The ratio condition is dropped (and flagged) when f(r)/r stays bounded.
  int first = -1, first_len = -1;
  for (int l = 1; l <= k.max_level; ++l) {
    if (len0 < k.c2 / std::pow(k.K, l)) continue;
    if (first_len < 0) first_len = l;
    double r = 2.0 * psi(std::pow(k.K, l));
    if (r > 0.0 && f(r) / r > info.C / (delta * len0)) {
      first = l;
      break;
    }
  }
  if (first < 0) {
    info.ratio_condition = false;
    first = first_len;
  }
  if (first < 0) {
    out.extinct = true;
    return out;
  }
  info.m = first - 1;

  std::vector<Interval> taken;  // sorted by lo
  for (int l = first; l <= k.max_level; ++l) {
    const double Kl = std::pow(k.K, l);
    const double sep = k.b / (Kl * Kl);
    const double rb = psi(Kl);
    const double ra = k.a / (Kl * Kl);
    std::vector<double> cand;
    for (const auto& r : src(0.5 * (B0.lo + B0.hi), std::min(kHalfPi, 0.5 * len0 + ra), Kl)) {
      if (r.l <= Kl / k.K || r.l > Kl) continue;
      if (r.theta + ra < B0.lo || r.theta - ra > B0.hi) continue;
      cand.push_back(r.theta);
    }
    std::sort(cand.begin(), cand.end());
    std::vector<Interval> level_balls;
    double last = -std::numeric_limits<double>::infinity();
    for (double t : cand) {
      if (t - last <= sep) continue;
      Interval S{t - sep, t + sep}, B{t - rb, t + rb};
      if (S.lo < B0.lo || S.hi > B0.hi || B.lo < B0.lo || B.hi > B0.hi) continue;
      if (overlaps_sorted(taken, S) || overlaps_sorted(taken, B)) continue;
      if (!level_balls.empty() && level_balls.back().hi >= B.lo) continue;
      level_balls.push_back(B);
      last = t;
    }
    for (const auto& B : level_balls) {
      insert_sorted(taken, B);
      info.sum_f += f(B.length());
      info.sum_len += B.length();
    }
    info.l_last = l;
    if (info.sum_f > info.C) break;
  }
  out.balls = std::move(taken);
  if (out.balls.empty()) out.extinct = true;

  // Locality: balls meeting each of 16 equal parts of B0.
  if (!out.balls.empty() && info.sum_f > 0.0) {
    for (int i = 0; i < 16; ++i) {
      Interval I{B0.lo + i * len0 / 16.0, B0.lo + (i + 1) * len0 / 16.0};
      double lhs = 0.0;
      for (const auto& B : out.balls) {
        if (B.hi >= I.lo && B.lo <= I.hi) lhs += f(B.length());
      }
      info.locality_max = std::max(info.locality_max, lhs / (I.length() / len0 * info.sum_f));
    }
  }
  return out;
}

}  // namespace

KhinchinResult khinchin_cantor(const RecordSource& src, const ApproximationFunction& psi, const DimensionFunction& f,
                               const KhinchinConstants& k, int depth) {
  if (!(k.K > 1.0) || !(k.b > 0.0 && k.b < 1.0) || !(k.a > 0.0) || !(k.eta > 0.0) || depth < 1) {
    throw Error(ErrorKind::ConfigError, "invalid Khinchin constants");
  }
  if (!(k.c1 / (4.0 * (k.a + k.b)) > k.M / (k.K * k.K))) {
    throw Error(ErrorKind::ConstantsInconsistent, "c1 / 4(a+b) > M / K^2 fails");
  }
  KhinchinResult res;
  res.c = k.c1 / (8.0 * (k.a + k.b));
  res.delta = k.b * (res.c - 3.0 * k.M / (k.K * k.K));
  if (!(res.delta > 0.0)) throw Error(ErrorKind::ConstantsInconsistent, "no positive delta", res.delta);
  res.Delta = 1.0 / (k.b * res.c);

  std::vector<IntervalFamily> levels(1);
  levels[0].level = 0;
  levels[0].intervals = {{-kHalfPi, kHalfPi}};
  levels[0].parent = {-1};
  std::vector<double> mu{1.0};
  std::size_t total = 1;
  for (int d = 1; d <= depth; ++d) {
    const auto& parents = levels.back().intervals;
    std::vector<NodeOutput> outs(parents.size());
    parallel_for(parents.size(), 0, [&](std::size_t i) {
      outs[i] = build_node(src, psi, f, k, res.delta, parents[i], mu[i]);
    });
    IntervalFamily F;
    F.level = d;
    std::vector<double> next_mu;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      auto& o = outs[i];
      o.info.level = d - 1;
      o.info.index = static_cast<int>(i);
      if (o.extinct) {
        throw Error(ErrorKind::ExtinctBranch,
                    "node [" + std::to_string(parents[i].lo) + ", " + std::to_string(parents[i].hi) +
                        "] has no admissible ball",
                    parents[i].lo);
      }
      if (!(o.info.sum_f > o.info.C)) res.all_nodes_ok = false;
      for (const auto& B : o.balls) {
        F.intervals.push_back(B);
        F.parent.push_back(static_cast<int>(i));
        next_mu.push_back(f(B.length()) / o.info.sum_f * mu[i]);
      }
      res.nodes.push_back(o.info);
    }
    total += F.intervals.size();
    if (total > k.budget) throw Error(ErrorKind::DepthInfeasible, "Cantor structure exceeds the budget", total);
    levels.push_back(std::move(F));
    mu = std::move(next_mu);
  }
  res.structure = mass_distribution(std::move(levels), f);
  return res;
}

}  // namespace flatdio
