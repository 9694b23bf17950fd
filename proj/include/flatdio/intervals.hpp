#pragma once

#include <vector>

namespace flatdio {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Sort-and-merge into disjoint intervals (touching intervals are merged).
std::vector<Interval> merge_intervals(std::vector<Interval> v);

// Exact Lebesgue measure of a finite union.
double union_measure(std::vector<Interval> v);

// Measure of I intersected with the union of `pieces`.
double covered_measure(const Interval& I, std::vector<Interval> pieces);

// Closed ball of radius r around a direction on R / pi Z, unwrapped into at
// most two arcs inside [-pi/2, pi/2). A radius >= pi/2 gives the full circle.
std::vector<Interval> circle_ball(double center, double r);

// Intersect a union with I, returning disjoint pieces inside I.
std::vector<Interval> clip_union(const Interval& I, std::vector<Interval> pieces);

}  // namespace flatdio
