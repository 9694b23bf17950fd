#include "flatdio/intervals.hpp"

#include <algorithm>

#include "flatdio/geom.hpp"

namespace flatdio {

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
  std::vector<Interval> out;
  v.erase(std::remove_if(v.begin(), v.end(), [](const Interval& a) { return !(a.hi >= a.lo); }), v.end());
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& a : v) {
    if (!out.empty() && a.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, a.hi);
    } else {
      out.push_back(a);
    }
  }
  return out;
}

double union_measure(std::vector<Interval> v) {
  double s = 0.0;
  for (const auto& a : merge_intervals(std::move(v))) s += a.length();
  return s;
}

std::vector<Interval> clip_union(const Interval& I, std::vector<Interval> pieces) {
  std::vector<Interval> out;
  for (const auto& a : merge_intervals(std::move(pieces))) {
    double lo = std::max(a.lo, I.lo), hi = std::min(a.hi, I.hi);
    if (hi > lo) out.push_back({lo, hi});
  }
  return out;
}

double covered_measure(const Interval& I, std::vector<Interval> pieces) {
  double s = 0.0;
  for (const auto& a : clip_union(I, std::move(pieces))) s += a.length();
  return s;
}

std::vector<Interval> circle_ball(double center, double r) {
  if (r >= kHalfPi) return {{-kHalfPi, kHalfPi}};
  double c = canonical_direction(center);
  double lo = c - r, hi = c + r;
  std::vector<Interval> out;
  if (lo < -kHalfPi) {
    out.push_back({-kHalfPi, hi});
    out.push_back({lo + kPi, kHalfPi});
  } else if (hi > kHalfPi) {
    out.push_back({lo, kHalfPi});
    out.push_back({-kHalfPi, hi - kPi});
  } else {
    out.push_back({lo, hi});
  }
  return out;
}

}  // namespace flatdio
