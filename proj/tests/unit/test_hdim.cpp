#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "flatdio/hdim.hpp"
#include "flatdio/scan.hpp"
#include "support.hpp"

using namespace flatdio;

namespace {

IntervalFamily family(int level, std::vector<Interval> I, std::vector<int> parent) {
  IntervalFamily F;
  F.level = level;
  F.intervals = std::move(I);
  F.parent = std::move(parent);
  return F;
}

// Middle-thirds Cantor set on [0, 1], tested at resolution 3^-depth.
bool in_cantor(double x, int depth) {
  if (x < 0.0 || x > 1.0) return false;
  for (int k = 0; k < depth; ++k) {
    x *= 3.0;
    int d = static_cast<int>(std::floor(x));
    if (d == 1 && x > 1.0 && x < 2.0) return false;
    x -= std::min(d, 2);
  }
  return true;
}

}  // namespace

TEST_SUITE("hdim") {

TEST_CASE("series test") {
  auto id = DimensionFunction::identity();
  CHECK(series_test(ApproximationFunction::power(3.0), id) == SeriesVerdict::convergent);
  CHECK(series_test(ApproximationFunction::power(2.0), id) == SeriesVerdict::divergent);
  CHECK(series_test(ApproximationFunction::power(2.5), DimensionFunction::power(0.9)) == SeriesVerdict::convergent);
  for (double tau : {2.0, 2.5, 4.0}) {
    auto f = DimensionFunction::power(2.0 / tau);
    CHECK(series_test(ApproximationFunction::psi_tau_eps(tau, 0.0), f) == SeriesVerdict::divergent);
    CHECK(series_test(ApproximationFunction::psi_tau_eps(tau, 0.2), f) == SeriesVerdict::convergent);
  }
  // Table psi decaying like t^-3 falls back to the condensed series.
  std::vector<std::pair<double, double>> knots;
  for (int k = 0; k <= 60; ++k) {
    double t = std::pow(2.0, k);
    knots.push_back({t, std::pow(t, -3.0)});
  }
  CHECK(series_test(ApproximationFunction::table(knots), id) == SeriesVerdict::convergent);
  CHECK(kind_of([&] { series_test(ApproximationFunction::power(2.0), id, 1.0); }) == ErrorKind::ConfigError);
}

TEST_CASE("box dimension of reference sets") {
  std::vector<double> scales{1e-2, 3e-3, 1e-3, 3e-4};
  auto full = box_dimension([](double) { return true; }, scales, {0.0, 1.0});
  CHECK(full.value == doctest::Approx(1.0).epsilon(0.02));
  auto pts = box_dimension_points({0.1, 0.2, 0.7}, scales, {0.0, 1.0});
  CHECK(std::abs(pts.value) < 0.02);
  std::vector<double> cs{1.0 / 27, 1.0 / 81, 1.0 / 243, 1.0 / 729};
  auto cantor = box_dimension([](double x) { return in_cantor(x, 9); }, cs, {0.0, 1.0}, 8);
  CHECK(cantor.value == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.02));
  CHECK(kind_of([&] { box_dimension([](double) { return true; }, {1e-2, 1e-3}); }) == ErrorKind::DegenerateFit);
}

TEST_CASE("mass distribution") {
  auto id = DimensionFunction::identity();
  // Single child carries the whole mass of its parent.
  auto C = mass_distribution({family(0, {{0, 1}}, {-1}), family(1, {{0.2, 0.4}}, {0})}, id);
  CHECK(C.masses[1][0] == doctest::Approx(1.0).epsilon(1e-15));
  // Equal siblings split evenly.
  C = mass_distribution({family(0, {{0, 1}}, {-1}), family(1, {{0, 0.2}, {0.4, 0.6}, {0.8, 1.0}}, {0, 0, 0})}, id);
  for (double m : C.masses[1]) CHECK(m == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(C.well_formed());
  CHECK(C.mass_defect() <= 1e-12);
  CHECK(C.mass({0.25, 0.35}) == 0.0);
  CHECK(C.mass({-1, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  // Monotone in the interval.
  double prev = 0;
  for (int k = 1; k <= 100; ++k) {
    double m = C.mass({0.0, k / 100.0});
    CHECK(m >= prev - 1e-15);
    prev = m;
  }
  // Unequal siblings follow f(|B|).
  C = mass_distribution({family(0, {{0, 1}}, {-1}), family(1, {{0, 0.1}, {0.5, 0.8}}, {0, 0})},
                        DimensionFunction::power(0.5));
  CHECK(C.masses[1][0] / C.masses[1][1] == doctest::Approx(std::sqrt(0.1 / 0.3)).epsilon(1e-12));
  CHECK(kind_of([&] { mass_distribution({}, id); }) == ErrorKind::EmptyLevel);
  CHECK(kind_of([&] { mass_distribution({family(0, {{0, 1}}, {-1}), family(1, {}, {})}, id); }) ==
        ErrorKind::EmptyLevel);
}

TEST_CASE("mass transference check") {
  auto id = DimensionFunction::identity();
  auto C = mass_distribution({family(0, {{0, 1}}, {-1}), family(1, {{0, 0.25}, {0.75, 1.0}}, {0, 0})}, id);
  // Lebesgue-like: mu(B) <= 2 |B| everywhere.
  auto ok = mass_transference_check(C, id, 0.5, 0.1, 2000, 1);
  CHECK(ok.pass);
  CHECK(ok.checked > 0);
  auto bad = mass_transference_check(C, id, 4.0, 0.1, 2000, 1);
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness_mass > bad.witness_bound);
}

TEST_CASE("upper cover on the torus") {
  auto src = source_from_torus_lattice();
  auto X = builtin("torus");
  UpperCoverParams p;
  p.eps = 0.3;
  p.m = 1;
  p.L0 = std::sqrt(2.0) * X.S0() * X.S0() / systole(X);
  p.window = 100;
  auto r = jarnik_upper_cover(src, p);
  MESSAGE("upper cover eps 0.3: value " << r.estimate.value << ", tau_fit " << r.tau_fit);
  CHECK(r.K == std::ceil(4 * 12 / std::pow(0.3, 4) - 1e-9));
  CHECK(r.estimate.value > 0.9);
  CHECK(r.estimate.value < 1.0);
  CHECK(r.tau_fit > 0.0);
  CHECK(r.survivors_disjoint);
  CHECK(r.pruned_covered);
  // Survivors per level: at most (1 - tau_fit) K per parent.
  REQUIRE(r.survivors.size() == static_cast<std::size_t>(p.depth));
  for (std::size_t k = 0; k < r.survivors.size(); ++k) {
    CHECK(r.survivors[k] <= (1.0 - r.tau_fit) * r.K * r.parents[k] * (1 + 1e-12));
  }
  CHECK(r.estimate.diagnostics.at("theorem_5U") <= r.estimate.diagnostics.at("theorem_8U"));

  p.depth = 2;
  p.window = 4;
  auto r2 = jarnik_upper_cover(src, p);
  REQUIRE(r2.survivors.size() == 2);
  const double bound = std::pow(1.0 - r2.tau_fit, 2) * r2.K * r2.K * r2.parents[0];
  CHECK(r2.survivors[1] <= bound * (1 + 1e-12));
  CHECK(r2.parents[1] == r2.survivors[0]);
  CHECK(kind_of([&] {
          auto q = p;
          q.eps = 1.0;
          jarnik_upper_cover(src, q);
        }) == ErrorKind::ConfigError);
}

TEST_CASE("lower Cantor set on the torus") {
  auto src = source_from_torus_lattice();
  LowerCantorParams p;
  p.eps = 0.2;
  p.depth = 3;
  auto r = jarnik_lower_cantor(src, p);
  MESSAGE("lower Cantor eps 0.2: value " << r.estimate.value << ", c_min " << r.c_min);
  CHECK(r.structure.well_formed());
  CHECK(r.structure.mass_defect() <= 1e-12);
  CHECK(r.leaves_avoid);
  CHECK(leaves_avoid_balls(r.structure, src, p.eps, std::pow(r.K, p.depth - 1)));
  CHECK(r.estimate.value > 0.0);
  CHECK(r.estimate.value <= 1.0);
  CHECK(mass_transference_check(r.structure, DimensionFunction::power(r.s), r.eta, 1e-3, 2000, 3).pass);

  UpperCoverParams up;
  up.eps = p.eps;
  up.window = 20;
  up.L0 = std::sqrt(2.0) * builtin("torus").S0() * builtin("torus").S0();
  CHECK(jarnik_upper_cover(src, up).estimate.value >= r.estimate.value);

  CHECK(kind_of([&] {
          auto q = p;
          q.depth = 1;
          jarnik_lower_cantor(src, q);
        }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] {
          auto q = p;
          q.depth = 30;
          jarnik_lower_cantor(src, q);
        }) == ErrorKind::DepthInfeasible);
}

TEST_CASE("greedy separation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> pts(1 + trial % 40);
    for (auto& x : pts) x = U(rng);
    const double sep = 0.01 + 0.1 * U(rng);
    auto kept = greedy_separated(pts, sep);
    REQUIRE_FALSE(kept.empty());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) REQUIRE(std::abs(kept[i] - kept[j]) >= sep);
    // Maximal: every dropped point is within sep of a kept one.
    for (double x : pts) {
      bool near = false;
      for (double y : kept) near |= std::abs(x - y) < sep;
      REQUIRE(near);
    }
  }
}

TEST_CASE("Khinchin Cantor construction") {
  auto src = source_from_torus_lattice();
  auto psi = ApproximationFunction::power(2.0);
  auto f = DimensionFunction::identity();
  KhinchinConstants k;
  auto r = khinchin_cantor(src, psi, f, k, 2);
  CHECK(r.structure.well_formed());
  CHECK(r.structure.mass_defect() <= 1e-12);
  CHECK(r.delta > 0.0);
  CHECK(r.c == doctest::Approx(k.c1 / (8 * (k.a + k.b))).epsilon(1e-15));
  CHECK_FALSE(r.nodes.empty());
  // Children at every level are separated by b K^-2n.
  for (std::size_t lv = 1; lv < r.structure.levels.size(); ++lv) {
    const auto& I = r.structure.levels[lv].intervals;
    for (std::size_t i = 1; i < I.size(); ++i) CHECK(I[i].lo >= I[i - 1].hi - 1e-15);
  }
  auto bad = k;
  bad.K = 1.5;
  CHECK(kind_of([&] { khinchin_cantor(src, psi, f, bad, 1); }) == ErrorKind::ConstantsInconsistent);
  bad = k;
  bad.b = 1.5;
  CHECK(kind_of([&] { khinchin_cantor(src, psi, f, bad, 1); }) == ErrorKind::ConfigError);
}

TEST_CASE("nesting and disjointness across builtins") {
  for (const char* name : {"octagon", "double-pentagon"}) {
    CAPTURE(name);
    auto X = normalize_area(builtin(name));
    auto src = source_from_surface(X, 4);
    LowerCantorParams p;
    p.eps = 0.25;
    p.depth = 3;
    auto r = jarnik_lower_cantor(src, p);
    CHECK(r.structure.well_formed());
    CHECK(r.structure.mass_defect() <= 1e-12);
    CHECK(leaves_avoid_balls(r.structure, src, p.eps, std::pow(r.K, p.depth - 1)));
  }
}

}  // TEST_SUITE
