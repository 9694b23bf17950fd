#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "flatdio/cf.hpp"
#include "flatdio/resonant.hpp"
#include "support.hpp"

using namespace flatdio;

namespace {

ResonantSet torus_set(double L) { return resonant_from_vectors(torus_oracle(L), L, ResonantKind::sc); }

const double kS0 = std::sqrt(2.0) / std::pow(3.0, 0.25);
const double kGolden = std::atan(golden_slope());

}  // namespace

TEST_SUITE("resonant") {

TEST_CASE("partition") {
  auto R = torus_set(10);
  auto P = partition(R, 2.0);
  std::size_t total = 0;
  for (const auto& [n, recs] : P) {
    total += recs.size();
    for (const auto& r : recs) {
      if (n == 0) CHECK(r.l <= 1.0);
      else CHECK((r.l > std::pow(2.0, n - 1) && r.l <= std::pow(2.0, n)));
    }
  }
  CHECK(total == R.size());
  CHECK(partition_index(1.0, 2.0) == 0);
  CHECK(partition_index(std::sqrt(5.0), 2.0) == 2);
}

TEST_CASE("dirichlet search examples") {
  auto X = builtin("torus");
  auto d = dirichlet_search(X, 0.0, 50.0);
  CHECK(d.theta_v == 0.0);
  CHECK(d.distance == 0.0);
  CHECK(d.bound_ok);

  // The returned direction for the golden slope comes from a convergent p_k/q_k.
  auto g = dirichlet_search(X, kGolden, 100.0);
  CHECK(g.bound_ok);
  auto conv = cf_convergents(std::vector<double>(40, 1.0));
  bool is_convergent = false;
  for (const auto& c : conv) {
    // Convergents of phi are F(k+1) / F(k); the direction has x / y = 1 / phi.
    if (std::abs(std::abs(g.rep.x) - c.q) < 1e-9 && std::abs(std::abs(g.rep.y) - c.p) < 1e-9) is_convergent = true;
  }
  CHECK(is_convergent);
  CHECK(kind_of([&] { dirichlet_search(X, 0.1, 0.5); }) == ErrorKind::HypothesisNotMet);
  ResonantSet empty;
  CHECK(kind_of([&] { dirichlet_search(empty, 0.1, 10.0, 1.0); }) == ErrorKind::EmptyTruncation);
}

TEST_CASE("dirichlet bound over random directions") {
  auto X = builtin("torus");
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  for (double L : {10.0, 100.0}) {
    for (int i = 0; i < 200; ++i) {
      double th = U(rng);
      auto d = dirichlet_search(X, th, L);
      CHECK(d.bound_ok);
      CHECK(d.l <= L);
      CHECK(d.bound == doctest::Approx(std::sqrt(2.0) * kS0 * kS0 / (d.l * L)).epsilon(1e-12));
    }
  }
}

TEST_CASE("approximation solutions") {
  auto R = torus_set(200);
  CHECK(approx_solutions(R, 0.3, ApproximationFunction::constant(kPi), 200).size() == R.size());
  auto exact = approx_solutions(R, 0.0, ApproximationFunction::constant(0.0), 200);
  REQUIRE(exact.size() == 1);
  CHECK(exact[0].theta == 0.0);

  // Brute force over oracle vectors for the golden slope and psi = l^-3.
  const double th = kGolden;
  auto psi = ApproximationFunction::power(3.0);
  std::size_t brute = 0;
  auto all = torus_oracle(1000);
  for (auto v : all) {
    if (v.y < 0 || (v.y == 0 && v.x < 0)) continue;  // one orientation per direction
    if (direction_distance(th, direction_of(v)) <= std::pow(v.norm(), -3.0)) ++brute;
  }
  CHECK(approx_solutions(torus_set(1000), th, psi, 1000).size() == brute);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  auto psi2 = ApproximationFunction::power(1.5);
  auto psi_big = ApproximationFunction::power(1.5, 2.0);
  for (int i = 0; i < 100; ++i) {
    double t = U(rng);
    auto a = approx_solutions(R, t, psi2, 50), b = approx_solutions(R, t, psi2, 200);
    auto c = approx_solutions(R, t, psi_big, 200);
    CHECK(a.size() <= b.size());
    CHECK(b.size() <= c.size());
    for (const auto& r : a)
      CHECK(std::any_of(b.begin(), b.end(), [&](const ResonantRecord& s) { return s.theta == r.theta; }));
  }
}

TEST_CASE("bad margin") {
  auto R = torus_set(1000);
  CHECK(bad_margin(R, std::atan(2.0 / 3.0), 0, 100) == 0.0);
  // liminf q ||q phi|| = 1 / sqrt 5 for the golden mean. Records with l > 100
  // outside a 1e-3 window have l^2 |dtheta| > 10, so the window suffices there.
  ResonantSet W;
  W.records = torus_sector_records(kGolden, 1e-3, 10000);
  double m = std::min(bad_margin(R, kGolden, 1, 100), bad_margin(W, kGolden, 100, 10000));
  CHECK(m == doctest::Approx(1 / std::sqrt(5.0)).epsilon(5e-3));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  for (int i = 0; i < 50; ++i) {
    double t = U(rng);
    double prev = kPi * 1e9;
    for (double L : {10.0, 100.0, 1000.0}) {
      double v = bad_margin(R, t, 0, L);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("bad margin and dirichlet search against brute force") {
  auto R = torus_set(300);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  for (int i = 0; i < 200; ++i) {
    double t = U(rng);
    double best1 = 1e300, best2 = 1e300;
    for (const auto& r : R.records) {
      double d = direction_distance(t, r.theta);
      best1 = std::min(best1, d * r.l);
      best2 = std::min(best2, d * r.l * r.l);
    }
    auto ds = dirichlet_search(R, t, 300, std::sqrt(2.0) * kS0 * kS0);
    CHECK(ds.distance * ds.l == doctest::Approx(best1).epsilon(1e-12));
    CHECK(bad_margin(R, t, 0, 300) == doctest::Approx(best2).epsilon(1e-12));
    // The Dirichlet record is a candidate for the margin.
    CHECK(bad_margin(R, t, 0, 300) <= ds.distance * ds.l * ds.l * (1 + 1e-12));
  }
}

TEST_CASE("inclusion chain between cylinder and saddle sets") {
  for (const char* name : {"torus", "octagon", "double-pentagon"}) {
    CAPTURE(name);
    auto X = normalize_area(builtin(name));
    const double L = 8;
    auto Rs = resonant_sc(X, L), Rc = resonant_cyl(X, L);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
    auto psi = ApproximationFunction::power(2.0, 0.5);
    for (int i = 0; i < 200; ++i) {
      double t = U(rng);
      auto sc = approx_solutions(Rs, t, psi, L);
      for (const auto& c : approx_solutions(Rc, t, psi, L)) {
        auto it = std::find_if(sc.begin(), sc.end(),
                               [&](const ResonantRecord& s) { return direction_distance(s.theta, c.theta) < 1e-9; });
        REQUIRE(it != sc.end());
        CHECK(it->l <= c.l + 1e-9);
      }
      const double eps2 = 0.01;
      // Failing cyl-badness implies failing sc-badness.
      if (bad_margin(Rc, t, 0, L) < eps2) CHECK(bad_margin(Rs, t, 0, L) < eps2);
    }
  }
}

TEST_CASE("intersecting cylinders are angularly separated") {
  for (const char* name : {"octagon", "double-pentagon"}) {
    auto X = normalize_area(builtin(name));
    auto cyls = enumerate_cylinders(X, 5);
    int pairs = 0;
    for (std::size_t i = 0; i < cyls.size(); ++i) {
      for (std::size_t j = 0; j < cyls.size(); ++j) {
        if (i == j || direction_distance(cyls[i].theta, cyls[j].theta) < 1e-9) continue;
        // Two cylinders whose areas add up to more than area(X) must meet.
        if (cyls[i].area + cyls[j].area <= X.area() + 1e-9) continue;
        double lhs = direction_distance(cyls[i].theta, cyls[j].theta);
        CHECK(lhs > cyls[i].area / (cyls[i].circumference * cyls[j].circumference));
        ++pairs;
      }
    }
    CAPTURE(name);
    CHECK(pairs > 0);
  }
}

TEST_CASE("growth checkers") {
  auto R = torus_set(50);
  auto qg = qg_check(R, {10, 20, 50});
  CHECK(qg.pass());
  CHECK(qg.fitted > 0.9);
  CHECK(qg.fitted < 1.0);
  CHECK(qg_check(ResonantSet{}, {10, 20}).fitted == 0.0);

  auto C = resonant_cyl(builtin("torus"), 50);
  auto samples = random_interval_samples(0, 100, 1e-3, 0.5, {10, 50});
  auto iqg = iqg_check(C, samples, 2.0);
  CHECK(iqg.pass());
  auto again = iqg_check(C, random_interval_samples(0, 100, 1e-3, 0.5, {10, 50}), 2.0);
  CHECK(again.to_json() == iqg.to_json());
}

TEST_CASE("ubiquity") {
  auto R = torus_set(200);
  UbiquityParams p;
  p.K = 10;
  p.n_values = {2};
  auto rep = ubiquity_check(R, p, {{0.0, 0.3}});
  CHECK(rep.samples == 1);
  CHECK(rep.fitted >= 0.5);
  CHECK(rep.pass());

  // A single direction: one ball of radius a K^-2n.
  ResonantSet one = resonant_from_vectors({{0, 1}}, 10, ResonantKind::sc);
  p.n_values = {1};
  auto r1 = ubiquity_check(one, p, {{-0.5, 0.5}});
  const double a = std::sqrt(3.0) * 10;
  CHECK(r1.fitted == doctest::Approx(2 * a / 100 / 1.0).epsilon(1e-12));

  // The size hypothesis skips short intervals.
  p.cyl = 1.0;
  auto r2 = ubiquity_check(R, p, {{0.0, 1e-4}});
  CHECK(r2.skipped == 1);
  CHECK(r2.samples == 0);
}

TEST_CASE("dirichlet property") {
  auto R = torus_set(400);
  DirichletPropertyParams p;
  p.eps = 0.5;
  p.S0 = kS0;
  auto samples = random_interval_samples(0, 50, 2 * 48.0 / (400.0 * 400.0), 0.5, {400});
  auto rep = dirichlet_property_check(R, p, samples);
  CHECK(rep.constants.at("U") == doctest::Approx(48.0).epsilon(1e-12));
  CHECK(rep.constants.at("tau") == doctest::Approx(0.25 / std::sqrt(48.0)).epsilon(1e-12));
  CHECK(rep.samples == 50);
  CHECK(rep.pass());
  std::vector<IntervalSample> tiny{{{0.1, 0.1 + 1e-4}, 400}};
  CHECK(kind_of([&] { dirichlet_property_check(R, p, tiny); }) == ErrorKind::HypothesisNotMet);
}

TEST_CASE("decaying property") {
  auto src = source_from_torus_lattice();
  DecayingParams p;
  p.eps = 0.1;
  p.n_max = 4;
  p.samples = 40;
  auto rep = decaying_check(src, p);
  CHECK(std::isfinite(rep.fitted));
  CHECK(rep.samples > 0);
  auto again = decaying_check(src, p);
  CHECK(again.to_json() == rep.to_json());
  p.theorem_mode = true;
  p.sys = 1.0;
  p.r0 = 0.5;
  p.eps = 0.6;
  CHECK(kind_of([&] { decaying_check(src, p); }) == ErrorKind::HypothesisNotMet);
}

TEST_CASE("horocycle closed form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 10000; ++i) {
    Vec2 h{U(rng), U(rng)};
    double K = 1.5 + std::abs(U(rng)), lambda = U(rng), alpha = U(rng);
    double a = horocycle_closed_form(h, K, lambda, alpha), b = horocycle_direct(h, K, lambda, alpha);
    REQUIRE(std::abs(a - b) <= 1e-10 * std::max(1.0, b));
  }
}

TEST_CASE("horocycle systole fraction") {
  auto X = builtin("torus");
  auto same = horocycle_systole_fraction(X, {-1, 1}, 0.5, 0.5, 2000);
  CHECK(same.fraction <= 1.0);
  auto r = horocycle_systole_fraction(X, {-1, 1}, 0.5, 0.05, 20000);
  CHECK(r.hypothesis_ok);
  CHECK(r.C_fit <= 10.0);
}

TEST_CASE("approximation function families") {
  auto f = ApproximationFunction::psi_tau_eps(2.0, 0.0);
  CHECK(f(std::exp(2.0)) == doctest::Approx(std::exp(-4.0) / 2.0).epsilon(1e-12));
  auto t = ApproximationFunction::table({{1, 1}, {10, 0.1}});
  CHECK(t(std::sqrt(10.0)) == doctest::Approx(1 / std::sqrt(10.0)).epsilon(1e-12));
  CHECK(t(100) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(kind_of([] { ApproximationFunction::constant(-1); }) == ErrorKind::ConfigError);
}

}  // TEST_SUITE
