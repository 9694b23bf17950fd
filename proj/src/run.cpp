#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "flatdio/billiard.hpp"
#include "flatdio/cli.hpp"
#include "flatdio/dynamics.hpp"
#include "flatdio/hdim.hpp"
#include "flatdio/resonant.hpp"
#include "flatdio/scan.hpp"

namespace flatdio {

using nlohmann::json;

namespace {

bool is_square_torus(const ExperimentConfig& c) { return c.text_or("builtin", "") == "torus"; }

// The square torus uses the lattice walk; other surfaces scan windows.
RecordSource record_source(const ExperimentConfig& c, const TranslationSurface& X) {
  if (is_square_torus(c)) return source_from_torus_lattice();
  return source_from_surface(X, 0);
}

TranslationSurface unit_area(const TranslationSurface& X, ExperimentReport& rep) {
  if (std::abs(X.area() - 1.0) <= 1e-9) return X;
  rep.warnings.push_back("surface rescaled to area 1");
  return normalize_area(X);
}

ResonantKind set_kind(const ExperimentConfig& c) {
  std::string s = c.text_or("set", "sc");
  if (s == "sc") return ResonantKind::sc;
  if (s == "cyl") return ResonantKind::cyl;
  throw Error(ErrorKind::ConfigError, "--set must be sc or cyl");
}

void run_scan(const ExperimentConfig& c, ExperimentReport& rep) {
  TranslationSurface X = surface_from_config(c);
  const double L = c.number("max-length");
  json rows = json::array();
  std::vector<double> lengths;
  if (c.flag("cylinders")) {
    for (const auto& cy : enumerate_cylinders(X, L)) {
      rows.push_back({"cyl", cy.theta, cy.core.x, cy.core.y, cy.circumference, cy.width, cy.area});
      lengths.push_back(cy.circumference);
    }
  } else {
    for (const auto& s : enumerate_saddle_connections(X, L)) {
      rows.push_back({"sc", direction_of(s.holonomy), s.holonomy.x, s.holonomy.y, s.length(), nullptr, nullptr});
      lengths.push_back(s.length());
    }
  }
  rep.results["count"] = rows.size();
  rep.results["max_length"] = L;
  rep.results["csv"] = {{"header", {"kind", "theta", "re", "im", "length", "width", "area"}}, {"rows", rows}};
  json cv = json::array();
  std::sort(lengths.begin(), lengths.end());
  for (int k = 1; k <= 20; ++k) {
    double r = L * k / 20.0;
    double n = static_cast<double>(std::upper_bound(lengths.begin(), lengths.end(), r) - lengths.begin());
    cv.push_back({r, n});
  }
  rep.results["series"]["count_vs_L"] = cv;
}

void run_verify(const ExperimentConfig& c, ExperimentReport& rep) {
  const std::string prop = c.text("property");
  const double eps = c.number("eps");
  TranslationSurface X = surface_from_config(c);
  const double L = c.number("max-length");
  const std::string mode = c.text_or("mode", "empirical");
  if (mode != "theorem" && mode != "empirical") throw Error(ErrorKind::ConfigError, "--mode must be theorem or empirical");
  const auto n = static_cast<std::size_t>(c.number_or("samples", 100));
  ResonantKind kind = set_kind(c);
  auto build = [&]() {
    if (kind == ResonantKind::cyl) return resonant_cyl(unit_area(X, rep), L);
    if (is_square_torus(c)) return resonant_from_vectors(torus_oracle(L), L, ResonantKind::sc);
    return resonant_sc(X, L);
  };
  PropertyReport pr;
  if (prop == "qg") {
    ResonantSet R = build();
    std::vector<double> radii;
    for (int k = 1; k <= 20; ++k) radii.push_back(L * k / 20.0);
    pr = qg_check(R, radii, c.number_or("bound", 0.0));
    json cv = json::array();
    std::vector<double> ls;
    for (const auto& r : R.records) ls.push_back(r.l);
    std::sort(ls.begin(), ls.end());
    for (double r : radii) cv.push_back({r, static_cast<double>(std::lower_bound(ls.begin(), ls.end(), r) - ls.begin())});
    rep.results["series"]["count_vs_L"] = cv;
  } else if (prop == "iqg") {
    ResonantSet R = build();
    auto samples = random_interval_samples(c.seed, n, 1.0 / (L * L), 0.5, {L / 4.0, L / 2.0, L});
    pr = iqg_check(R, samples, c.number_or("bound", 0.0));
  } else if (prop == "ubiquity") {
    ResonantSet R = build();
    UbiquityParams p;
    p.K = c.number_or("K", 10.0);
    p.theorem_mode = mode == "theorem";
    p.T0 = X.T0();
    if (kind == ResonantKind::cyl) p.cyl = cyl_shortest(unit_area(X, rep));
    int nmax = 0;
    while (std::pow(p.K, nmax + 1) <= L) ++nmax;
    if (nmax < 1) throw Error(ErrorKind::ConfigError, "ubiquity needs max-length >= K");
    p.n_values.clear();
    for (int k = 1; k <= nmax; ++k) p.n_values.push_back(k);
    std::vector<Interval> Is;
    for (const auto& s : random_interval_samples(c.seed, n, 1e-2, 0.5, {L})) Is.push_back(s.I);
    pr = ubiquity_check(R, p, Is);
  } else if (prop == "dirichlet") {
    ResonantSet R = build();
    DirichletPropertyParams p;
    p.eps = eps;
    p.S0 = X.S0();
    if (mode == "theorem") p.sys = systole(X);
    const double m = X.m();
    const double U = 12.0 / (m * m * eps * eps);
    const double lo = 2.0 * U / (L * L);
    if (lo > kPi) throw Error(ErrorKind::ConfigError, "max-length too small for the Dirichlet property at this eps");
    auto samples = random_interval_samples(c.seed, n, lo, std::min(kPi, 10.0 * lo), {L});
    pr = dirichlet_property_check(R, p, samples);
  } else if (prop == "decaying") {
    DecayingParams p;
    p.eps = eps;
    p.n_max = static_cast<int>(c.number_or("depth", 3));
    p.samples = n;
    p.seed = c.seed;
    p.theorem_mode = mode == "theorem";
    p.r0 = c.number_or("r0", 0.0);
    p.sys = systole(X);
    p.beta = X.beta();
    pr = decaying_check(record_source(c, X), p);
  } else {
    throw Error(ErrorKind::ConfigError, "--property must be qg, iqg, ubiquity, dirichlet or decaying");
  }
  pr.mode = mode;
  rep.results["report"] = pr.to_json();
}

void run_dimension(const ExperimentConfig& c, ExperimentReport& rep) {
  TranslationSurface X = surface_from_config(c);
  const double eps = c.number("eps");
  const std::string method = c.text_or("method", "upper");
  const int depth = static_cast<int>(c.number_or("depth", method == "upper" ? 1 : 3));
  if (set_kind(c) == ResonantKind::cyl && method != "box") {
    throw Error(ErrorKind::ConfigError, "upper and lower estimators run on the saddle-connection set");
  }
  RecordSource src = record_source(c, X);
  rep.results["reference"] = {{"lower", 1.0 - 0.99 * eps * eps}, {"upper", 1.0 - 0.25 * eps * eps}};
  if (method == "upper") {
    UpperCoverParams p;
    p.eps = eps;
    p.m = X.m();
    p.depth = depth;
    p.L0 = std::sqrt(2.0) * X.S0() * X.S0() / systole(X);
    auto r = jarnik_upper_cover(src, p);
    rep.results["estimate"] = r.estimate.to_json();
    rep.results["tau_fit"] = r.tau_fit;
    rep.results["survivors_disjoint"] = r.survivors_disjoint;
    rep.results["pruned_covered"] = r.pruned_covered;
  } else if (method == "lower") {
    LowerCantorParams p;
    p.eps = eps;
    p.depth = depth;
    auto r = jarnik_lower_cantor(src, p);
    rep.results["estimate"] = r.estimate.to_json();
    rep.results["eta"] = r.eta;
    rep.results["leaves_avoid"] = r.leaves_avoid;
    json levels = json::array();
    for (const auto& F : r.structure.levels) {
      json lv = json::array();
      for (std::size_t i = 0; i < F.intervals.size() && i < 2000; ++i) lv.push_back({F.intervals[i].lo, F.intervals[i].hi});
      levels.push_back(lv);
    }
    rep.results["series"]["interval_levels"] = levels;
  } else if (method == "box") {
    const double L = c.number_or("max-length", 100.0);
    ResonantSet R = set_kind(c) == ResonantKind::cyl ? resonant_cyl(unit_area(X, rep), L) : resonant_sc(X, L);
    const double L0 = c.number_or("L0", 1.0);
    std::vector<Interval> balls;
    for (const auto& r : R.records) {
      if (r.l <= L0) continue;
      for (auto b : circle_ball(r.theta, eps * eps / (r.l * r.l))) balls.push_back(b);
    }
    auto merged = merge_intervals(balls);
    auto member = [&](double x) {
      auto it = std::lower_bound(merged.begin(), merged.end(), x, [](const Interval& a, double v) { return a.hi < v; });
      return !(it != merged.end() && it->lo <= x);
    };
    std::vector<double> scales;
    for (int k = 1; k <= 4; ++k) scales.push_back(std::pow(10.0, -k) * 0.5);
    rep.results["estimate"] = box_dimension(member, scales).to_json();
  } else {
    throw Error(ErrorKind::ConfigError, "--method must be upper, lower or box");
  }
}

void run_geodesic(const ExperimentConfig& c, ExperimentReport& rep) {
  TranslationSurface X = unit_area(surface_from_config(c), rep);
  const double T = c.number("horizon");
  const double alpha = c.number_or("alpha", 0.0);
  std::vector<double> thetas;
  if (c.has("theta")) {
    thetas.push_back(c.number("theta"));
  } else if (c.has("random")) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(-kHalfPi, kHalfPi);
    for (int i = 0; i < static_cast<int>(c.number("random")); ++i) thetas.push_back(U(rng));
  } else {
    throw Error(ErrorKind::ConfigError, "geodesic needs --theta or --random");
  }
  RecordSource src = source_from_torus_lattice();
  json rows = json::array(), per = json::array(), series = json::array();
  for (double th : thetas) {
    GeodesicTrace tr = is_square_torus(c) ? sys_along_geodesic(src, th, T, X.S0()) : sys_along_geodesic(X, th, T);
    json item;
    item["theta"] = th;
    item["events"] = tr.events.size();
    item["candidates"] = tr.candidates;
    auto mn = tr.min_on(0.0, T);
    item["min_sys"] = mn.second;
    item["t_min"] = mn.first;
    item["sys_T"] = tr.sys(T);
    if (T >= std::exp(2.0)) item["log_law"] = log_law_exponent(tr, alpha);
    per.push_back(item);
    for (const auto& e : tr.events) {
      rows.push_back({th, e.t0, e.sys_at(e.t0), e.hol.x, e.hol.y});
      if (thetas.size() == 1) series.push_back({e.t0, e.sys_at(e.t0)});
    }
  }
  rep.results["horizon"] = T;
  rep.results["alpha"] = alpha;
  rep.results["directions"] = per;
  rep.results["csv"] = {{"header", {"theta", "t_event", "sys", "gamma_re", "gamma_im"}}, {"rows", rows}};
  if (!series.empty()) rep.results["series"]["sys_vs_t"] = series;
}

void run_billiard(const ExperimentConfig& c, ExperimentReport& rep) {
  TranslationSurface X = surface_from_config(c);
  const double theta = c.number("theta");
  const double budget = c.number_or("budget", 1e6);
  FlowState s = start_state(X, theta);
  if (c.has("point")) {
    double x = 0, y = 0;
    char comma = 0;
    std::istringstream in(c.text("point"));
    if (!(in >> x >> comma >> y) || comma != ',') throw Error(ErrorKind::ConfigError, "--point must be x,y");
    s = locate(X, 0, {x, y}, theta);
  }
  std::vector<double> radii;
  if (c.has("radii")) {
    double r0 = 0;
    int k = 0;
    char comma = 0;
    std::istringstream in(c.text("radii"));
    if (!(in >> r0 >> comma >> k) || comma != ',' || k < 1 || !(r0 > 0)) {
      throw Error(ErrorKind::ConfigError, "--radii must be r0,k");
    }
    for (int j = 0; j < k; ++j) radii.push_back(std::ldexp(r0, -j));
  } else {
    radii = default_radii(X, s);
  }
  auto E = recurrence_rate(X, s, radii, budget);
  json rows = json::array(), series = json::array();
  for (const auto& p : E.points) {
    rows.push_back({p.r, p.R, p.censored ? 1 : 0});
    if (!p.censored) series.push_back({-std::log(p.r), std::log(p.R)});
  }
  rep.results["omega"] = E.omega;
  rep.results["slope"] = E.slope;
  rep.results["omega_pushed"] = std::isnan(E.omega_pushed) ? json(nullptr) : json(E.omega_pushed);
  rep.results["invariance_gap"] = std::isnan(E.invariance_gap) ? json(nullptr) : json(E.invariance_gap);
  rep.results["censored"] = E.censored;
  rep.results["csv"] = {{"header", {"r", "R", "censored"}}, {"rows", rows}};
  rep.results["series"]["loglog_recurrence"] = series;
  // Points of the orbit in polygon coordinates, at most 2000 of them.
  json traj = json::array();
  const double span = std::min(budget, 200.0);
  try {
    FlowState cur = s;
    for (int k = 0; k < 2000; ++k) {
      Vec2 q = polygon_point(X, cur);
      traj.push_back({q.x, q.y});
      cur = flow(X, cur, span / 2000.0);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::HitsSingularity) throw;
  }
  rep.results["series"]["trajectory"] = traj;
  for (const auto& n : E.notes) rep.warnings.push_back(n);
}

}  // namespace

ExperimentReport run(const ExperimentConfig& c) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = c;
  if (c.command == "scan") run_scan(c, rep);
  else if (c.command == "verify") run_verify(c, rep);
  else if (c.command == "dimension") run_dimension(c, rep);
  else if (c.command == "geodesic") run_geodesic(c, rep);
  else if (c.command == "billiard") run_billiard(c, rep);
  else throw Error(ErrorKind::ConfigError, "unknown command '" + c.command + "'");
  if (c.timing) rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace flatdio
