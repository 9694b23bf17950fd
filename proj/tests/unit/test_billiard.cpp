#include <cmath>
#include <random>

#include "doctest.h"
#include "flatdio/billiard.hpp"
#include "flatdio/cf.hpp"
#include "support.hpp"

using namespace flatdio;

TEST_SUITE("billiard") {

TEST_CASE("unit speed and reversibility") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0, 1);
  for (const char* name : {"torus", "octagon", "double-pentagon", "L(2,3)"}) {
    CAPTURE(name);
    auto X = builtin(name);
    for (int i = 0; i < 50; ++i) {
      auto s = start_state(X, 2 * kPi * U(rng));
      // A short step stays in the chart of a small disk: displacement equals time.
      double inj = injectivity_radius(X, s);
      double dt = 0.5 * inj * U(rng);
      auto a = flow(X, s, dt);
      CHECK(a.time == doctest::Approx(s.time + dt).epsilon(1e-12));
      Vec2 d = polygon_point(X, a) - polygon_point(X, s);
      if (a.tri == s.tri) CHECK(d.norm() == doctest::Approx(dt).epsilon(1e-9));
      try {
        double T = 50 * U(rng);
        auto b = flow(X, s, T);
        auto back = flow(X, b, -T);
        CHECK((polygon_point(X, back) - polygon_point(X, s)).norm() < 1e-9);
        auto c = flow(X, flow(X, s, 0.4 * T), 0.6 * T);
        CHECK((polygon_point(X, c) - polygon_point(X, b)).norm() < 1e-9);
      } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::HitsSingularity);
      }
    }
  }
}

TEST_CASE("torus return times") {
  auto X = builtin("torus");
  auto s = locate(X, 0, {0.5, 0.5}, 0.0);
  auto r = return_time(X, s, 0.1, 100);
  CHECK_FALSE(r.censored);
  CHECK(r.R == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(kind_of([&] { return_time(X, s, 0.3, 100); }) == ErrorKind::RadiusTooLarge);
  // The diagonal from (0.3, 0.3) runs into the corner at time 0.7 sqrt 2.
  auto d = locate(X, 0, {0.3, 0.3}, kPi / 4);
  try {
    flow(X, d, 2.0);
    FAIL("expected HitsSingularity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HitsSingularity);
    CHECK(e.value() == doctest::Approx(0.7 * std::sqrt(2.0)).epsilon(1e-9));
  }
  CHECK(kind_of([&] { locate(X, 0, {1.5, 0.5}, 0.0); }) == ErrorKind::ConfigError);
}

TEST_CASE("return times grow as the radius shrinks") {
  auto X = builtin("octagon");
  auto s = start_state(X, 0.37);
  double prev = 0;
  for (double r : default_radii(X, s, 1e-3)) {
    auto rec = return_time(X, s, r, 1e5);
    if (rec.censored) break;
    CHECK(rec.R >= prev - 1e-12);
    CHECK(rec.R > r);
    prev = rec.R;
  }
  CHECK(prev > 0);
}

TEST_CASE("square billiard against the 2 x 2 torus") {
  auto B = builtin("square-billiard");
  auto T2 = apply_matrix(Mat2{2, 0, 0, 2}, builtin("torus"));
  CHECK(B.area() == doctest::Approx(T2.area()).epsilon(1e-12));
  const double theta = 0.3172;
  const Vec2 p{0.41, 0.29};
  auto sb = locate(B, 0, p, theta);
  auto st = locate(T2, 0, p, theta);
  int compared = 0;
  for (int k = 3; k <= 9; ++k) {
    double r = std::pow(2.0, -k);
    try {
      auto a = return_time(B, sb, r, 1e4);
      auto b = return_time(T2, st, r, 1e4);
      CAPTURE(r);
      CHECK(a.censored == b.censored);
      CHECK(a.R == doctest::Approx(b.R).epsilon(1e-9));
      ++compared;
    } catch (const Error& e) {
      // Marked points of the unfolding lie off the torus vertex set.
      REQUIRE(e.kind() == ErrorKind::HitsSingularity);
    }
  }
  CHECK(compared >= 4);
}

TEST_CASE("recurrence rate on the torus") {
  auto X = builtin("torus");
  auto s = locate(X, 0, {0.5 * (std::sqrt(5.0) - 1), 0.2}, std::atan(golden_slope()));
  auto est = recurrence_rate(X, s, default_radii(X, s, 1e-4), 1e6);
  MESSAGE("golden omega " << est.omega << ", slope " << est.slope << ", pushed gap " << est.invariance_gap);
  CHECK(est.omega == doctest::Approx(1.0).epsilon(0.1));
  CHECK(est.censored == 0);
  CHECK(std::isfinite(est.omega_pushed));
  CHECK(est.invariance_gap <= 0.05);
  CHECK(est.invariance_gap == doctest::Approx(std::abs(est.omega - est.omega_pushed)).epsilon(1e-12));
  // p and flow(p, 1) share return times unless a vertex sits between them, so gaps are usually 0.
  auto Y = builtin("octagon");
  auto so = start_state(Y, std::atan(golden_slope()));
  auto eo = recurrence_rate(Y, so, default_radii(Y, so, 1e-4), 1e6);
  MESSAGE("octagon omega " << eo.omega << ", pushed gap " << eo.invariance_gap);
  CHECK(eo.invariance_gap <= 0.05);
}

TEST_CASE("S_tau experiment and bridge inputs") {
  auto X = builtin("torus");
  CHECK(kind_of([&] { s_tau_experiment(X, 7.0, 4); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { s_tau_experiment(X, 1.5, 4); }) == ErrorKind::ConfigError);
  auto t = s_tau_experiment(X, 3.0, 6, 5);
  CHECK(t.rows.size() == 6);
  CHECK(t.target == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.reference == doctest::Approx(2.0 / 3).epsilon(1e-15));
  auto u = s_tau_experiment(X, 3.0, 6, 5);
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i].omega == u.rows[i].omega);
  auto src = source_from_torus_lattice();
  CHECK(kind_of([&] { recurrence_diophantine_bridge(X, src, std::atan(0.5), 2.5, 100, 2); }) ==
        ErrorKind::ResonantDirection);
}

}  // TEST_SUITE
