#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flatdio/intervals.hpp"
#include "flatdio/resonant.hpp"
#include "json.hpp"

namespace flatdio {

enum class SeriesVerdict { convergent, divergent, undetermined };
const char* series_verdict_name(SeriesVerdict v);

// Classifies sum n f(psi(n)) (equivalently sum K^2n f(psi(K^n))). Throws
// HypothesisViolated when t f(psi(t)) is not decreasing on sampled t.
SeriesVerdict series_test(const ApproximationFunction& psi, const DimensionFunction& f, double K = 2.0);

struct IntervalFamily {
  int level = 0;
  std::vector<Interval> intervals;  // sorted, disjoint interiors
  std::vector<int> parent;          // index into the previous level; -1 at the root
};

struct CantorStructure {
  std::vector<IntervalFamily> levels;
  std::vector<std::vector<double>> masses;  // parallel to levels[i].intervals

  const IntervalFamily& leaves() const { return levels.back(); }
  // Mass of an arbitrary interval: leaf masses spread uniformly on each leaf.
  double mass(const Interval& J) const;
  // Interiors disjoint and each child inside its parent (1e-15 slack).
  bool well_formed() const;
  // max over parents of |sum of child masses - parent mass|, and |total - 1|.
  double mass_defect() const;
};

// Masses by mu(B) = f(|B|) / sum f(|B'|) * mu(parent). Roots share mass 1 the
// same way. Throws EmptyLevel for an empty level or a childless inner node.
CantorStructure mass_distribution(std::vector<IntervalFamily> levels, const DimensionFunction& f);

struct TransferenceResult {
  bool pass = true;
  std::size_t checked = 0;
  double max_ratio = 0.0;  // max mu(B) eta / f(|B|)
  Interval witness{};
  double witness_mass = 0.0;
  double witness_bound = 0.0;
};

// Checks mu(B) <= f(|B|) / eta on every stored interval and on `samples`
// random intervals of length below rho0 centered inside random leaves.
TransferenceResult mass_transference_check(const CantorStructure& C, const DimensionFunction& f, double eta,
                                           double rho0, std::size_t samples = 10000, std::uint64_t seed = 0);

struct DimensionEstimate {
  std::string kind;  // upper_cover | lower_cantor | box_count
  double value = 0.0;
  std::map<std::string, double> params;
  std::map<std::string, double> diagnostics;
  std::vector<double> level_counts;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

struct UpperCoverParams {
  double eps = 0.3;
  double U = 0.0;    // <= 0 selects 12 / (m^2 eps^2)
  double tau = 0.0;  // <= 0 selects m eps^2 / sqrt(48)
  double L0 = 0.0;   // Dirichlet threshold, e.g. sqrt(2) S0^2 / sys
  int m = 1;
  int depth = 1;                // subdivision steps after level N
  std::size_t window = 200;     // level-N parents around `center`
  double center = 0.5535743588970452;  // atan(1 / golden ratio)
  std::size_t budget = 10000000;
};

struct UpperCoverResult {
  DimensionEstimate estimate;
  int N = 0;
  double K = 0.0;
  double tau_fit = 0.0;
  std::vector<double> survivors;  // per level after N, inside the window
  std::vector<double> parents;    // parent counts per level
  bool survivors_disjoint = true;  // no survivor meets a pruning ball
  bool pruned_covered = true;      // every pruned child meets a ball eps^2 / l^2
};

UpperCoverResult jarnik_upper_cover(const RecordSource& src, const UpperCoverParams& p);

struct LowerCantorParams {
  double eps = 0.1;
  double tau = 0.0;  // reported theorem value uses it when > 0
  int depth = 3;     // number of levels including I0
  double center = 0.5535743588970452;
  std::size_t budget = 10000000;
};

struct LowerCantorResult {
  DimensionEstimate estimate;
  CantorStructure structure;
  double K = 0.0;
  double c_min = 0.0;
  double s = 0.0;
  double eta = 0.0;       // construction eta, 1 / (2 K^4s)
  double eta_stored = 0.0;  // min f(|I|) / mu(I) over stored intervals
  bool leaves_avoid = true;  // leaves avoid B(theta, eps^3 / l^2) for l <= K^(depth-1)
};

LowerCantorResult jarnik_lower_cantor(const RecordSource& src, const LowerCantorParams& p);

// Independent recheck: every leaf avoids B(theta, eps^3 / l^2) for l <= L.
bool leaves_avoid_balls(const CantorStructure& C, const RecordSource& src, double eps, double L);

struct KhinchinConstants {
  double K = 8.0;
  double a = 0.05;
  double c1 = 0.5;
  double c2 = 0.5;
  double b = 0.5;
  double M = 2.0;  // quadratic growth constant
  double eta = 0.01;
  int max_level = 12;  // cap on l(B0)
  std::size_t budget = 10000000;
};

struct KhinchinNode {
  int level = 0;
  int index = 0;
  int m = 0;        // m(B0)
  int l_last = 0;   // l(B0)
  double C = 0.0;
  double sum_f = 0.0;
  double sum_len = 0.0;
  double locality_max = 0.0;  // max over tested I of lhs / (|I| / |B0| * sum_f)
  bool ratio_condition = true;  // f(r)/r > C / (delta |B0|) held at m(B0) + 1
};

struct KhinchinResult {
  CantorStructure structure;
  std::vector<KhinchinNode> nodes;
  double c = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
  bool all_nodes_ok = true;  // every node has sum_f > C
};

// Greedy sep-separated subset, scanning points in the given order.
std::vector<double> greedy_separated(const std::vector<double>& points, double sep);

// Throws ConstantsInconsistent when c1 / 4(a+b) > M / K^2 fails or delta <= 0.
KhinchinResult khinchin_cantor(const RecordSource& src, const ApproximationFunction& psi, const DimensionFunction& f,
                               const KhinchinConstants& k, int depth);

// N(delta) counts grid cells (anchored at domain.lo) holding a member of a
// grid of points with spacing min(scales) / oversample. Throws DegenerateFit
// for fewer than 3 scales.
DimensionEstimate box_dimension(const std::function<bool(double)>& member, const std::vector<double>& scales,
                                Interval domain = {-kHalfPi, kHalfPi}, int oversample = 4);

// Box counting of a finite point set; an empty set gives 0 with a note.
DimensionEstimate box_dimension_points(const std::vector<double>& points, const std::vector<double>& scales,
                                       Interval domain = {-kHalfPi, kHalfPi});

}  // namespace flatdio
