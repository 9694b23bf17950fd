#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flatdio/hdim.hpp"
#include "flatdio/resonant.hpp"
#include "flatdio/surface.hpp"

namespace flatdio {

// A point of X in the chart of triangle `tri`, moving in direction theta
// (full angle from the vertical, so theta and theta + pi are opposite).
struct FlowState {
  int tri = 0;
  Vec2 p;
  double theta = 0.0;
  double time = 0.0;
};

// Point p of polygon `polygon` (polygon chart). Throws ConfigError when p is
// not in the polygon.
FlowState locate(const TranslationSurface& X, int polygon, Vec2 p, double theta);
// Centroid of triangle 0.
FlowState start_state(const TranslationSurface& X, double theta);

// Straight-line advance by dt (negative dt runs backwards). Throws
// HitsSingularity with the hit time when the orbit reaches a vertex.
FlowState flow(const TranslationSurface& X, const FlowState& s, double dt);

// Polygon-chart position of a state.
Vec2 polygon_point(const TranslationSurface& X, const FlowState& s);

struct RecurrenceRecord {
  double r = 0.0;
  double R = 0.0;  // return time, or the budget when censored
  bool censored = false;
};

// min(distance to the vertices, sys / 2), a lower bound for the injectivity
// radius at the point.
double injectivity_radius(const TranslationSurface& X, const FlowState& s);

// R(p, r) = inf{t > r : |flow(p, t) - p| < r}, detected exactly per chart.
// Throws RadiusTooLarge for r >= inj / 2 and HitsSingularity.
RecurrenceRecord return_time(const TranslationSurface& X, const FlowState& s, double r, double t_budget);

struct RecurrenceEstimate {
  double omega = 0.0;  // min of log R / -log r over the tail
  double slope = 0.0;  // least-squares slope of log R against -log r
  std::vector<RecurrenceRecord> points;
  std::size_t censored = 0;
  double omega_pushed = 0.0;  // the same estimate at flow(p, 1); NaN when skipped
  double invariance_gap = 0.0;
  std::vector<std::string> notes;
};

// r_k = 2^-k from the first k with r_k < inj / 2 down to r_min.
std::vector<double> default_radii(const TranslationSurface& X, const FlowState& s, double r_min = 1e-4);

// The tail is the second half of the uncensored points.
RecurrenceEstimate recurrence_rate(const TranslationSurface& X, const FlowState& s,
                                   const std::vector<double>& radii, double t_budget, bool push_check = true);

struct BridgeReport {
  double theta = 0.0;
  double eta = 0.0;
  double threshold = 0.0;  // 1 / (eta - 1)
  std::vector<double> omegas;
  double q25 = 0.0, median = 0.0, q75 = 0.0;
  std::size_t solutions = 0;        // records with |theta - theta_v| <= l^-eta, sqrt(L) < l <= L
  std::size_t solutions_below = 0;  // the same at eta - 0.1
  double last_solution = 0.0;
  // Rows: omega below / not below the threshold; columns: member / not member.
  std::size_t agreement[2][2] = {{0, 0}, {0, 0}};
  bool consistent = true;  // no sample with omega < threshold outside W(eta)
};

// Throws ResonantDirection when theta is a record direction up to L.
BridgeReport recurrence_diophantine_bridge(const TranslationSurface& X, const RecordSource& src, double theta,
                                           double eta, double L, std::size_t samples, std::uint64_t seed = 0,
                                           double t_budget = 1e6);

struct STauRow {
  double theta = 0.0;
  double omega = 0.0;
  bool pass = false;
};

struct STauTable {
  double tau = 2.0;
  double target = 1.0;  // 1 / (tau - 1)
  std::vector<STauRow> rows;
  double pass_fraction = 0.0;
  double median_omega = 0.0;
  DimensionEstimate dimension;  // box count of the passing directions
  double reference = 1.0;       // 2 / tau
};

// tau = 2 samples theta uniformly; tau > 2 uses designed slopes with random
// prefixes. ConfigError outside 2 <= tau <= 6.
STauTable s_tau_experiment(const TranslationSurface& X, double tau, std::size_t n_samples, std::uint64_t seed = 0,
                           double t_budget = 1e6, double tol = 0.15, double r_min = 1e-4);

// Direction from the vertical of the slope x / y = alpha.
inline double direction_of_slope(double alpha) { return std::atan(alpha); }

}  // namespace flatdio
