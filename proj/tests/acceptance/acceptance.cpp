// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: acceptance [--unit-tests PATH] [--only K]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flatdio/billiard.hpp"
#include "flatdio/cf.hpp"
#include "flatdio/dynamics.hpp"
#include "flatdio/hdim.hpp"
#include "flatdio/resonant.hpp"
#include "flatdio/scan.hpp"

using namespace flatdio;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kGoldenTheta = std::atan(golden_slope());

// 1. Chart enumeration against primitive lattice vectors, counted here.
Outcome enumeration_oracle() {
  Outcome o{true, ""};
  auto X = builtin("torus");
  for (long L : {10L, 50L, 100L}) {
    auto t0 = Clock::now();
    auto scs = enumerate_saddle_connections(X, static_cast<double>(L));
    double dt = seconds_since(t0);
    std::vector<std::pair<long, long>> got, want;
    for (const auto& s : scs) got.emplace_back(std::lround(s.holonomy.x), std::lround(s.holonomy.y));
    bool integral = true;
    for (const auto& s : scs) {
      integral &= std::abs(s.holonomy.x - std::round(s.holonomy.x)) < 1e-9;
      integral &= std::abs(s.holonomy.y - std::round(s.holonomy.y)) < 1e-9;
    }
    for (long p = -L; p <= L; ++p)
      for (long q = -L; q <= L; ++q)
        if (p * p + q * q <= L * L && std::gcd(std::labs(p), std::labs(q)) == 1) want.emplace_back(p, q);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    bool eq = integral && got == want;
    o.pass &= eq;
    if (L == 100) o.pass &= dt < 10.0;
    o.detail += "L=" + std::to_string(L) + ": " + std::to_string(got.size()) + "/" + std::to_string(want.size()) +
                (eq ? " equal" : " DIFFER") + fmt(" %.2fs; ", dt);
  }
  return o;
}

// 2. Dirichlet record bound sqrt(2) S0^2 / (l L), 100% of trials.
Outcome dirichlet_theorem() {
  auto X = builtin("torus");
  const double S0 = std::sqrt(2.0) / std::pow(3.0, 0.25);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  std::vector<double> thetas(1000);
  for (auto& t : thetas) t = U(rng);
  Outcome o{true, ""};
  for (double L : {10.0, 100.0, 1000.0}) {
    auto t0 = Clock::now();
    std::size_t ok = 0;
    for (double th : thetas) {
      auto d = dirichlet_search(X, th, L);
      // Recompute the distance from the returned holonomy.
      double dist = direction_distance(th, direction_of(d.rep));
      bool good = d.l <= L + 1e-9 && dist <= std::sqrt(2.0) * S0 * S0 / (d.l * L) * (1 + 1e-12);
      ok += good;
    }
    o.pass &= ok == thetas.size();
    o.detail += "L=" + fmt("%g", L) + ": " + std::to_string(ok) + "/1000" + fmt(" %.1fs; ", seconds_since(t0));
  }
  return o;
}

// 3. Isotropic quadratic growth for R^cyl with bound m(m+1).
Outcome isotropic_growth() {
  Outcome o{true, ""};
  struct Case {
    const char* name;
    double L;
    double bound;
  };
  for (Case c : {Case{"torus", 100.0, 2.0}, Case{"octagon", 40.0, 12.0}}) {
    auto X = normalize_area(builtin(c.name));
    auto R = resonant_cyl(X, c.L);
    // |I| >= 16 / L^2 keeps every pair admissible (L^2 |I| >= 1 at L / 4).
    auto samples = random_interval_samples(0, 100, 16.0 / (c.L * c.L), 0.5, {c.L / 4, c.L / 2, c.L});
    auto rep = iqg_check(R, samples, c.bound);
    // Independent count for the worst ratio.
    double worst = 0.0;
    for (const auto& s : samples) {
      double n = 0;
      for (const auto& r : R.records) n += r.l < s.L && s.I.contains(r.theta);
      worst = std::max(worst, n / (s.I.length() * s.L * s.L));
    }
    bool ok = rep.pass() && rep.samples - rep.skipped == 100 && worst < c.bound;
    o.pass &= ok;
    o.detail += std::string(c.name) + ": " + std::to_string(rep.violations.size()) + " violations, max count/(|I|L^2) " +
                fmt("%.3f", worst) + fmt(" < %g; ", c.bound);
  }
  return o;
}

// 4. Dani correspondence on the golden direction.
Outcome dani() {
  // Oracle: q_n ||q_n phi|| = 1 / (phi + q_(n-1) / q_n) along Fibonacci convergents, so the
  // liminf is 1 / (phi + 1 / phi) = 1 / sqrt 5. Evaluated at n = 40 without cancellation.
  double cf_oracle = 0.0;
  {
    const double phi = 0.5 * (1 + std::sqrt(5.0));
    double a = 1, b = 1;
    for (int k = 0; k < 40; ++k) {
      double c = a + b;
      a = b;
      b = c;
    }
    cf_oracle = 1.0 / (phi + a / b);
  }
  auto t0 = Clock::now();
  auto X = builtin("torus");
  auto d = dani_correspondence_check(X, kGoldenTheta, 1e4, std::log(1e4));
  double dt = seconds_since(t0);
  const double tol = 1e-2;
  bool ok = std::abs(d.angle_form - cf_oracle) <= tol && std::abs(d.re_im_form - cf_oracle) <= tol &&
            std::abs(d.sys_form - cf_oracle) <= tol && dt < 60.0;
  return {ok, "oracle " + fmt("%.6f", cf_oracle) + ", angle " + fmt("%.6f", d.angle_form) + ", re*im " +
                  fmt("%.6f", d.re_im_form) + ", sys^2/2 " + fmt("%.6f", d.sys_form) + fmt(", %.1fs", dt)};
}

// 5. Recurrence rates on the unfolded square.
Outcome recurrence() {
  auto B = builtin("square-billiard");
  auto golden = start_state(B, kGoldenTheta);
  auto eg = recurrence_rate(B, golden, default_radii(B, golden, 1e-4), 1e7);
  // Designed slope [0; 10, 10^2, 10^4, 10^8]: a_(k+1) ~ q_k, so tau_eff = 3.
  double alpha = cf_value({0, 10, 100, 1e4, 1e8});
  auto designed = start_state(B, direction_of_slope(alpha));
  auto ed = recurrence_rate(B, designed, default_radii(B, designed, 1e-4), 1e7);
  bool ok = std::abs(eg.omega - 1.0) <= 0.1 && std::abs(ed.omega - 0.5) <= 0.15 && eg.censored == 0 && ed.censored == 0;
  return {ok, "golden omega " + fmt("%.4f", eg.omega) + " (target 1 +- 0.1), tau=3 omega " + fmt("%.4f", ed.omega) +
                  " (target 0.5 +- 0.15)"};
}

struct JarnikRun {
  double eps;
  double lower;
  double upper;
  LowerCantorResult cantor;
};

std::vector<JarnikRun>& jarnik_runs() {
  static std::vector<JarnikRun> runs;
  if (!runs.empty()) return runs;
  auto X = builtin("torus");
  auto src = source_from_torus_lattice();
  for (double eps : {0.3, 0.2, 0.1, 0.05}) {
    UpperCoverParams up;
    up.eps = eps;
    up.m = X.m();
    up.L0 = std::sqrt(2.0) * X.S0() * X.S0() / systole(X);
    LowerCantorParams lp;
    lp.eps = eps;
    lp.depth = 3;
    auto lo = jarnik_lower_cantor(src, lp);
    runs.push_back({eps, lo.estimate.value, jarnik_upper_cover(src, up).estimate.value, std::move(lo)});
  }
  return runs;
}

// 6. Jarnik estimators ordered, inside (0, 1), monotone in eps.
Outcome jarnik() {
  auto t0 = Clock::now();
  const auto& runs = jarnik_runs();
  Outcome o{true, ""};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    o.pass &= r.lower <= r.upper && r.lower > 0 && r.lower < 1 && r.upper > 0 && r.upper < 1;
    if (i) o.pass &= r.lower >= runs[i - 1].lower && r.upper >= runs[i - 1].upper;
    o.detail += "eps=" + fmt("%g", r.eps) + ": " + fmt("%.4f", r.lower) + " <= " + fmt("%.4f", r.upper) + " [ref " +
                fmt("%.4f", 1 - 0.99 * r.eps * r.eps) + ", " + fmt("%.4f", 1 - 0.25 * r.eps * r.eps) + "]; ";
  }
  o.detail += fmt("%.1fs", seconds_since(t0));
  return o;
}

// 7. Probability measures passing the transference check at their eta.
Outcome mass_invariants() {
  Outcome o{true, ""};
  auto check = [&](const std::string& name, const CantorStructure& C, const DimensionFunction& f, double eta) {
    double defect = C.mass_defect();
    double rho0 = C.levels.front().intervals.front().length();
    auto t = mass_transference_check(C, f, eta, rho0, 10000, 0);
    bool ok = defect <= 1e-12 && t.pass && C.well_formed();
    o.pass &= ok;
    o.detail += name + ": defect " + fmt("%.1e", defect) + ", max mu*eta/f " + fmt("%.3f", t.max_ratio) + " over " +
                std::to_string(t.checked) + (ok ? "; " : " FAIL; ");
  };
  for (const auto& r : jarnik_runs()) {
    check("cantor eps=" + fmt("%g", r.eps), r.cantor.structure, DimensionFunction::power(r.cantor.s), r.cantor.eta);
  }
  KhinchinConstants k;
  auto kc = khinchin_cantor(source_from_torus_lattice(), ApproximationFunction::power(2.0),
                            DimensionFunction::identity(), k, 2);
  check("khinchin", kc.structure, DimensionFunction::identity(), k.eta);
  return o;
}

// 8. Median solution counts at L = 1e2 and 1e3.
Outcome khinchin_signature() {
  auto t0 = Clock::now();
  auto src = source_from_torus_lattice();
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
  std::vector<double> thetas(1000);
  for (auto& t : thetas) t = U(rng);
  auto median = [&](const ApproximationFunction& phi, double L) {
    KhinchinStatParams p;
    p.phi = phi;
    p.L = L;
    p.with_sys = false;
    return khinchin_statistic(src, thetas, p).median_count;
  };
  auto div = ApproximationFunction::power(1.0), conv = ApproximationFunction::power(1.5);
  double d2 = median(div, 1e2), d3 = median(div, 1e3), c2 = median(conv, 1e2), c3 = median(conv, 1e3);
  bool ok = d3 > d2 && std::abs(c3 - c2) <= 1.0;
  return {ok, "divergent phi=1/t: " + fmt("%g", d2) + " -> " + fmt("%g", d3) + "; convergent phi=t^-1.5: " +
                  fmt("%g", c2) + " -> " + fmt("%g", c3) + fmt("; %.1fs", seconds_since(t0))};
}

// 9. Horocycle systole fraction and the closed form.
Outcome horocycle() {
  auto X = builtin("torus");
  auto r = horocycle_systole_fraction(X, {-1, 1}, 0.5, 0.05, 20000);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(-3, 3);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec2 h{U(rng), U(rng)};
    double K = 1.5 + std::abs(U(rng)), lambda = U(rng), alpha = U(rng);
    // Direct: diag(K^lambda, K^-lambda) [[1, -alpha], [0, 1]] h.
    double x = std::pow(K, lambda) * (h.x - alpha * h.y), y = std::pow(K, -lambda) * h.y;
    double direct = std::hypot(x, y);
    worst = std::max(worst, std::abs(horocycle_closed_form(h, K, lambda, alpha) - direct) / std::max(1.0, direct));
  }
  // Dense-grid oracle from the lattice: sys(u_-alpha X) = min over primitive (p, q) of |(p - alpha q, q)|.
  // Vectors longer than 5 cannot drop below rho' = 0.05 for |alpha| <= 1.
  auto vecs = torus_oracle(5.0);
  std::size_t below = 0;
  const int grid = 100000;
  for (int i = 0; i < grid; ++i) {
    double a = -1.0 + 2.0 * (i + 0.5) / grid, sys = 1e300;
    for (auto v : vecs) sys = std::min(sys, std::hypot(v.x - a * v.y, v.y));
    below += sys <= 0.05;
  }
  double oracle = static_cast<double>(below) / grid;
  bool ok = r.hypothesis_ok && r.C_fit <= 10.0 && std::abs(r.fraction - oracle) <= 1e-3 && worst <= 1e-10;
  return {ok, "fraction " + fmt("%.4f", r.fraction) + " (grid oracle " + fmt("%.4f", oracle) + "), C_fit " +
                  fmt("%.3f", r.C_fit) + " <= 10, closed form err " + fmt("%.1e", worst)};
}

// 10. Whole property suite.
Outcome property_suite(const std::string& unit_tests) {
  if (unit_tests.empty()) return {false, "no --unit-tests binary given"};
  auto t0 = Clock::now();
  int st = std::system((unit_tests + " --no-version --minimal > /dev/null 2>&1").c_str());
  double dt = seconds_since(t0);
  bool ok = st == 0 && dt < 900.0;
  return {ok, "exit status " + std::to_string(st) + fmt(", %.1fs (limit 900s)", dt)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatdio acceptance checks"};
  std::string unit_tests;
  int only = 0;
  app.add_option("--unit-tests", unit_tests, "unit test binary for criterion 10");
  app.add_option("--only", only, "run a single criterion");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"enumeration oracle equivalence", enumeration_oracle},
      {"Dirichlet record bound", dirichlet_theorem},
      {"isotropic quadratic growth", isotropic_growth},
      {"Dani correspondence", dani},
      {"recurrence rate", recurrence},
      {"Jarnik estimators ordered and monotone", jarnik},
      {"mass distribution invariants", mass_invariants},
      {"Khinchin dichotomy signature", khinchin_signature},
      {"horocycle measurement", horocycle},
      {"property suite", [&] { return property_suite(unit_tests); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%2zu] %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
