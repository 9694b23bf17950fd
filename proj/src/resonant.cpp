#include "flatdio/resonant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"

namespace flatdio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double loglog_interp(const std::vector<std::pair<double, double>>& knots, double t) {
  if (knots.empty()) throw Error(ErrorKind::ConfigError, "table function without knots");
  if (t <= knots.front().first) return knots.front().second;
  if (t >= knots.back().first) return knots.back().second;
  auto it = std::upper_bound(knots.begin(), knots.end(), t,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (a.second <= 0.0 || b.second <= 0.0) {
    double s = (t - a.first) / (b.first - a.first);
    return a.second + s * (b.second - a.second);
  }
  double s = (std::log(t) - std::log(a.first)) / (std::log(b.first) - std::log(a.first));
  return std::exp(std::log(a.second) + s * (std::log(b.second) - std::log(a.second)));
}

void check_knots(const std::vector<std::pair<double, double>>& knots) {
  if (knots.empty()) throw Error(ErrorKind::ConfigError, "table function without knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].first > 0.0) || knots[i].second < 0.0) {
      throw Error(ErrorKind::ConfigError, "table knots must have t > 0 and non-negative values");
    }
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
      throw Error(ErrorKind::ConfigError, "table knots must be strictly increasing in t");
    }
  }
}

// Indices of records (sorted by theta) within `halfwidth` of `center` on R / pi Z.
template <typename F>
void for_window(const std::vector<ResonantRecord>& recs, double center, double halfwidth, F&& fn) {
  if (recs.empty()) return;
  if (halfwidth >= kHalfPi) {
    for (const auto& r : recs) fn(r);
    return;
  }
  double c = canonical_direction(center);
  auto scan = [&](double lo, double hi) {
    auto it = std::lower_bound(recs.begin(), recs.end(), lo,
                               [](const ResonantRecord& r, double v) { return r.theta < v; });
    for (; it != recs.end() && it->theta <= hi; ++it) fn(*it);
  };
  double lo = c - halfwidth, hi = c + halfwidth;
  if (lo < -kHalfPi) {
    scan(-kHalfPi, hi);
    scan(lo + kPi, kHalfPi);
  } else if (hi >= kHalfPi) {
    scan(lo, kHalfPi);
    scan(-kHalfPi, hi - kPi);
  } else {
    scan(lo, hi);
  }
}

// Distance from a direction to the interval I (zero inside).
double distance_to_interval(double theta, const Interval& I) {
  double c = 0.5 * (I.lo + I.hi);
  return std::max(0.0, direction_distance(theta, c) - 0.5 * I.length());
}

}  // namespace

// ---------------------------------------------------------------------------
// Approximation and dimension functions

double ApproximationFunction::operator()(double t) const {
  switch (family) {
    case Family::power:
      return c * std::pow(t, -tau);
    case Family::power_log:
      return c * std::pow(t, -tau) * std::pow(std::max(1.0, std::log(t)), -sigma);
    case Family::constant:
      return c;
    case Family::table:
      return loglog_interp(knots, t);
  }
  return c;
}

std::string ApproximationFunction::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::power:
      os << "power(c=" << c << ",tau=" << tau << ")";
      break;
    case Family::power_log:
      os << "power_log(c=" << c << ",tau=" << tau << ",sigma=" << sigma << ")";
      break;
    case Family::constant:
      os << "constant(" << c << ")";
      break;
    case Family::table:
      os << "table(" << knots.size() << " knots)";
      break;
  }
  return os.str();
}

ApproximationFunction ApproximationFunction::power(double tau, double c) {
  if (!(c > 0.0) || tau < 0.0) throw Error(ErrorKind::ConfigError, "power family needs c > 0 and tau >= 0");
  ApproximationFunction f;
  f.family = Family::power;
  f.tau = tau;
  f.c = c;
  return f;
}

ApproximationFunction ApproximationFunction::power_log(double tau, double sigma, double c) {
  if (!(c > 0.0) || tau < 0.0 || sigma < 0.0) {
    throw Error(ErrorKind::ConfigError, "power_log family needs c > 0, tau >= 0, sigma >= 0");
  }
  ApproximationFunction f;
  f.family = Family::power_log;
  f.tau = tau;
  f.sigma = sigma;
  f.c = c;
  return f;
}

ApproximationFunction ApproximationFunction::psi_tau_eps(double tau, double eps) {
  return power_log(tau, (1.0 + eps) * tau / 2.0, 1.0);
}

ApproximationFunction ApproximationFunction::constant(double value) {
  if (value < 0.0) throw Error(ErrorKind::ConfigError, "constant approximation function must be >= 0");
  ApproximationFunction f;
  f.family = Family::constant;
  f.c = value;
  f.tau = 0.0;
  return f;
}

ApproximationFunction ApproximationFunction::table(std::vector<std::pair<double, double>> knots) {
  check_knots(knots);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].second > knots[i - 1].second) {
      throw Error(ErrorKind::ConfigError, "approximation table must be non-increasing");
    }
  }
  ApproximationFunction f;
  f.family = Family::table;
  f.knots = std::move(knots);
  return f;
}

double DimensionFunction::operator()(double r) const {
  switch (family) {
    case Family::power:
      return std::pow(r, s);
    case Family::identity:
      return r;
    case Family::table:
      return loglog_interp(knots, r);
  }
  return r;
}

std::string DimensionFunction::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::power:
      os << "power(s=" << s << ")";
      break;
    case Family::identity:
      os << "identity";
      break;
    case Family::table:
      os << "table(" << knots.size() << " knots)";
      break;
  }
  return os.str();
}

DimensionFunction DimensionFunction::power(double s) {
  if (!(s > 0.0) || s > 1.0) throw Error(ErrorKind::ConfigError, "dimension exponent must lie in (0, 1]");
  DimensionFunction f;
  f.family = s == 1.0 ? Family::identity : Family::power;
  f.s = s;
  return f;
}

DimensionFunction DimensionFunction::identity() { return DimensionFunction{}; }

DimensionFunction DimensionFunction::table(std::vector<std::pair<double, double>> knots) {
  check_knots(knots);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].second < knots[i - 1].second) {
      throw Error(ErrorKind::ConfigError, "dimension table must be non-decreasing");
    }
  }
  DimensionFunction f;
  f.family = Family::table;
  f.knots = std::move(knots);
  return f;
}

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json j;
  j["property"] = property;
  j["mode"] = mode;
  j["constants"] = constants;
  j["samples"] = samples;
  j["skipped"] = skipped;
  j["fitted"] = fitted;
  j["pass"] = pass();
  auto v = nlohmann::json::array();
  for (const auto& x : violations) v.push_back({{"where", x.where}, {"value", x.value}, {"bound", x.bound}});
  j["violations"] = v;
  j["notes"] = notes;
  return j;
}

// ---------------------------------------------------------------------------
// Partition and Dirichlet search

int partition_index(double l, double K) {
  if (!(K > 1.0)) throw Error(ErrorKind::ConfigError, "partition needs K > 1");
  if (l <= 1.0) return 0;
  int n = static_cast<int>(std::ceil(std::log(l) / std::log(K)));
  // Fix rounding at exact powers of K.
  while (n > 1 && l <= std::pow(K, n - 1)) --n;
  while (l > std::pow(K, n)) ++n;
  return std::max(n, 1);
}

std::map<int, std::vector<ResonantRecord>> partition(const ResonantSet& R, double K) {
  std::map<int, std::vector<ResonantRecord>> out;
  for (const auto& r : R.records) out[partition_index(r.l, K)].push_back(r);
  return out;
}

DirichletResult dirichlet_search(const ResonantSet& R, double theta, double L, double bound_const) {
  const ResonantRecord* best = nullptr;
  double best_key = kInf, best_dist = kInf;
  for (const auto& r : R.records) {
    if (r.l > L) continue;
    double d = direction_distance(theta, r.theta);
    double key = d * r.l;
    if (key < best_key || (key == best_key && best && r.l < best->l)) {
      best = &r;
      best_key = key;
      best_dist = d;
    }
  }
  if (!best) throw Error(ErrorKind::EmptyTruncation, "no record with l <= L", L);
  DirichletResult res;
  res.theta_v = best->theta;
  res.l = best->l;
  res.rep = best->rep;
  res.distance = best_dist;
  res.bound = bound_const / (best->l * L);
  res.bound_ok = best_dist <= res.bound * (1.0 + 1e-12);
  return res;
}

DirichletResult dirichlet_search(const TranslationSurface& X, double theta, double L, double sys, ResonantKind kind) {
  // The guaranteed constant scales with the area.
  if (kind == ResonantKind::cyl) {
    double cyl = cyl_shortest(X);
    double log_thresh = 0.5 * std::log(2.0) + 2.0 * X.log2_T0() * std::log(2.0) - std::log(cyl);
    if (std::log(L) <= log_thresh) {
      throw Error(ErrorKind::HypothesisNotMet, "cylinder Dirichlet search needs L > sqrt(2) T0^2 / cyl(X)",
                  std::exp(std::min(log_thresh, 700.0)));
    }
    ResonantSet R = resonant_cyl(X, L);
    return dirichlet_search(R, theta, L, std::sqrt(2.0) * std::exp(2.0 * X.log2_T0() * std::log(2.0)));
  }
  if (sys <= 0.0) sys = systole(X);
  const double c = std::sqrt(2.0) * X.S0() * X.S0() * X.area();
  if (!(L > c / sys)) {
    throw Error(ErrorKind::HypothesisNotMet, "Dirichlet search needs L > sqrt(2) S0^2 / sys(X)", c / sys);
  }
  // Any vector outside the strip |Re| <= A has angle * length >= |Re| > A, so
  // a minimum found inside the strip that is <= A is global.
  double A = c / L;
  while (true) {
    ScanRegion reg;
    reg.max_length = L;
    reg.use_box = true;
    reg.box_theta = theta;
    reg.box_re = A;
    reg.box_im = L;
    ResonantSet R = resonant_sc_region(X, reg);
    if (!R.empty()) {
      DirichletResult res = dirichlet_search(R, theta, L, c);
      if (res.distance * res.l <= A || A >= L) return res;
    } else if (A >= L) {
      throw Error(ErrorKind::EmptyTruncation, "no saddle connection with length <= L", L);
    }
    A = std::min(2.0 * A, L);
  }
}

std::vector<ResonantRecord> approx_solutions(const ResonantSet& R, double theta, const ApproximationFunction& psi,
                                             double L) {
  std::vector<ResonantRecord> out;
  for (const auto& r : R.records) {
    if (r.l > L) continue;
    if (direction_distance(theta, r.theta) <= psi(r.l)) out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(), [](const ResonantRecord& a, const ResonantRecord& b) { return a.l < b.l; });
  return out;
}

double bad_margin(const ResonantSet& R, double theta, double L0, double L) {
  double best = kInf;
  for (const auto& r : R.records) {
    if (r.l <= L0 || r.l > L) continue;
    best = std::min(best, r.l * r.l * direction_distance(theta, r.theta));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Growth checks

PropertyReport qg_check(const ResonantSet& R, const std::vector<double>& radii, double bound) {
  PropertyReport rep;
  rep.property = "QG";
  rep.mode = bound > 0.0 ? "theorem" : "empirical";
  if (bound > 0.0) rep.constants["M"] = bound;
  std::vector<double> ls;
  for (const auto& r : R.records) ls.push_back(r.l);
  std::sort(ls.begin(), ls.end());
  for (double r : radii) {
    if (!(r > 0.0)) continue;
    ++rep.samples;
    double count = static_cast<double>(std::lower_bound(ls.begin(), ls.end(), r) - ls.begin());
    rep.fitted = std::max(rep.fitted, count / (r * r));
    if (bound > 0.0 && count >= bound * r * r) {
      rep.violations.push_back({"R=" + std::to_string(r), count, bound * r * r});
    }
  }
  return rep;
}

PropertyReport iqg_check(const ResonantSet& R, const std::vector<IntervalSample>& samples, double bound) {
  PropertyReport rep;
  rep.property = "IQG";
  rep.mode = "theorem";
  if (bound <= 0.0) bound = static_cast<double>(R.m) * (R.m + 1);
  rep.constants["M"] = bound;
  for (const auto& s : samples) {
    double len = s.I.length();
    if (s.L * s.L * len < 1.0) {
      ++rep.skipped;
      continue;
    }
    if (s.L > R.length_bound * (1.0 + 1e-12)) {
      rep.notes.push_back("sample with L beyond the truncation bound skipped");
      ++rep.skipped;
      continue;
    }
    ++rep.samples;
    double count = 0.0;
    for_window(R.records, 0.5 * (s.I.lo + s.I.hi), 0.5 * len, [&](const ResonantRecord& r) {
      if (r.l < s.L) count += 1.0;
    });
    double scale = len * s.L * s.L;
    rep.fitted = std::max(rep.fitted, count / scale);
    if (count >= bound * scale) {
      std::ostringstream w;
      w << "I=[" << s.I.lo << "," << s.I.hi << "] L=" << s.L;
      rep.violations.push_back({w.str(), count, bound * scale});
    }
  }
  return rep;
}

std::vector<IntervalSample> random_interval_samples(std::uint64_t seed, std::size_t count, double min_len,
                                                    double max_len, const std::vector<double>& radii) {
  if (radii.empty() || !(min_len > 0.0) || max_len < min_len || max_len > kPi) {
    throw Error(ErrorKind::ConfigError, "invalid interval sampling parameters");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  std::vector<IntervalSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    double len = std::exp(std::log(min_len) + U01(rng) * (std::log(max_len) - std::log(min_len)));
    double lo = -kHalfPi + U01(rng) * (kPi - len);
    out.push_back({{lo, lo + len}, radii[i % radii.size()]});
  }
  return out;
}

PropertyReport ubiquity_check(const ResonantSet& R, const UbiquityParams& p, const std::vector<Interval>& intervals) {
  if (!(p.K > 1.0)) throw Error(ErrorKind::ConfigError, "ubiquity needs K > 1");
  PropertyReport rep;
  rep.property = "U";
  rep.mode = p.theorem_mode ? "theorem" : "empirical";
  const double a = p.a > 0.0 ? p.a : std::sqrt(3.0) * p.K;
  rep.constants["K"] = p.K;
  rep.constants["a"] = a;
  rep.constants["c1"] = p.c1;
  if (p.theorem_mode) {
    if (!(p.cyl > 0.0) || !(p.T0 > 0.0) || p.K < std::sqrt(2.0) * p.T0 * p.T0 / p.cyl) {
      throw Error(ErrorKind::HypothesisNotMet, "ubiquity theorem mode needs K >= sqrt(2) T0^2 / cyl(X)");
    }
  }
  double min_frac = kInf;
  for (int n : p.n_values) {
    const double Ln = std::pow(p.K, n);
    const double r = a / std::pow(p.K, 2 * n);
    if (Ln > R.length_bound * (1.0 + 1e-12)) {
      rep.notes.push_back("n=" + std::to_string(n) + " exceeds the truncation bound, skipped");
      rep.skipped += intervals.size();
      continue;
    }
    for (const auto& I : intervals) {
      if (p.cyl > 0.0 && I.length() < 1.0 / (2.0 * R.m * p.cyl * std::pow(p.K, n - 1))) {
        ++rep.skipped;
        continue;
      }
      ++rep.samples;
      std::vector<Interval> balls;
      for_window(R.records, 0.5 * (I.lo + I.hi), 0.5 * I.length() + r, [&](const ResonantRecord& rec) {
        if (rec.l > Ln) return;
        for (auto b : circle_ball(rec.theta, r)) balls.push_back(b);
      });
      double frac = covered_measure(I, std::move(balls)) / I.length();
      min_frac = std::min(min_frac, frac);
      if (frac < p.c1) {
        std::ostringstream w;
        w << "I=[" << I.lo << "," << I.hi << "] n=" << n;
        rep.violations.push_back({w.str(), frac, p.c1});
      }
    }
  }
  rep.fitted = rep.samples ? min_frac : 0.0;
  return rep;
}

PropertyReport dirichlet_property_check(const ResonantSet& R, const DirichletPropertyParams& p,
                                        const std::vector<IntervalSample>& samples) {
  if (!(p.eps > 0.0)) throw Error(ErrorKind::ConfigError, "eps must be positive");
  PropertyReport rep;
  rep.property = "DIR";
  const double m = R.m;
  const double U = p.U > 0.0 ? p.U : 12.0 / (m * m * p.eps * p.eps);
  const double tau = p.tau > 0.0 ? p.tau : m * p.eps * p.eps / std::sqrt(48.0);
  rep.mode = (p.U > 0.0 || p.tau > 0.0) ? "empirical" : "theorem";
  rep.constants["eps"] = p.eps;
  rep.constants["U"] = U;
  rep.constants["tau"] = tau;
  const double e2 = p.eps * p.eps;
  double min_frac = kInf;
  for (const auto& s : samples) {
    if (s.I.length() < 2.0 * U / (s.L * s.L)) {
      throw Error(ErrorKind::HypothesisNotMet, "interval shorter than 2U / L^2", s.I.length());
    }
    if (p.sys > 0.0 && p.S0 > 0.0 && s.L < std::sqrt(2.0) * p.S0 * p.S0 / p.sys) {
      throw Error(ErrorKind::HypothesisNotMet, "L below sqrt(2) S0^2 / sys(X)", s.L);
    }
    if (s.L > R.length_bound * (1.0 + 1e-12)) {
      throw Error(ErrorKind::HypothesisNotMet, "L beyond the truncation bound", s.L);
    }
    ++rep.samples;
    std::vector<Interval> balls;
    for (const auto& rec : R.records) {
      if (rec.l > s.L) continue;
      double r = e2 / (2.0 * rec.l * rec.l);
      if (distance_to_interval(rec.theta, s.I) > r) continue;
      for (auto b : circle_ball(rec.theta, r)) balls.push_back(b);
    }
    double frac = covered_measure(s.I, std::move(balls)) / s.I.length();
    min_frac = std::min(min_frac, frac);
    if (frac < tau) {
      std::ostringstream w;
      w << "I=[" << s.I.lo << "," << s.I.hi << "] L=" << s.L;
      rep.violations.push_back({w.str(), frac, tau});
    }
  }
  rep.fitted = rep.samples ? min_frac : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Decaying

RecordSource source_from_set(const ResonantSet& R) {
  return [&R](double center, double halfwidth, double L) {
    if (L > R.length_bound * (1.0 + 1e-12)) {
      throw Error(ErrorKind::BudgetExceeded, "record request beyond the truncation bound", L);
    }
    std::vector<ResonantRecord> out;
    for_window(R.records, center, halfwidth, [&](const ResonantRecord& r) {
      if (r.l <= L) out.push_back(r);
    });
    return out;
  };
}

RecordSource source_from_torus_lattice() { return torus_sector_records; }

RecordSource source_from_surface(const TranslationSurface& X, int threads) {
  return [&X, threads](double center, double halfwidth, double L) {
    ScanRegion r;
    r.max_length = L;
    r.threads = threads;
    if (2.0 * halfwidth < kPi) {
      r.use_sector = true;
      r.sector_lo = center - halfwidth;
      r.sector_hi = center + halfwidth;
    }
    std::vector<ResonantRecord> out;
    for (const auto& rec : resonant_sc_region(X, r).records) {
      if (!r.use_sector || direction_distance(rec.theta, center) <= halfwidth) out.push_back(rec);
    }
    return out;
  };
}

std::vector<ResonantRecord> records_near(const RecordSource& src, double center, double half, double L,
                                         const std::function<double(double)>& rad) {
  std::vector<ResonantRecord> out;
  auto near = [&](const ResonantRecord& r) { return direction_distance(r.theta, center) <= half + rad(r.l); };
  for (const auto& r : src(center, kHalfPi, std::min(L, 1.0))) {
    if (r.l < 1.0 && near(r)) out.push_back(r);
  }
  for (double a = 1.0; a <= L; a *= 2.0) {
    double b = std::min(L, 2.0 * a);
    double hw = std::min(kHalfPi, half + rad(a));
    for (const auto& r : src(center, hw, b)) {
      bool in_shell = a == 1.0 ? (r.l >= 1.0 && r.l <= b) : (r.l > a && r.l <= b);
      if (in_shell && near(r)) out.push_back(r);
    }
    if (b >= L) break;
  }
  return out;
}

namespace {

// Records of R(K, j) whose ball of radius rad(l) meets I.
template <typename Rad>
std::vector<Interval> level_balls(const RecordSource& src, const Interval& I, double K, int j, double max_rad,
                                  Rad&& rad) {
  const double Lj = std::pow(K, j);
  const double lo_l = j == 0 ? 0.0 : std::pow(K, j - 1);
  double half = j == 0 ? kHalfPi : std::min(kHalfPi, 0.5 * I.length() + max_rad);
  std::vector<Interval> out;
  for (const auto& r : src(0.5 * (I.lo + I.hi), half, Lj)) {
    if (r.l <= lo_l || r.l > Lj) continue;
    double rr = rad(r.l);
    if (distance_to_interval(r.theta, I) > rr) continue;
    for (auto b : circle_ball(r.theta, rr)) out.push_back(b);
  }
  return out;
}

}  // namespace

bool decaying_admissible(const RecordSource& src, const Interval& I, double eps, int n) {
  const double K = 1.0 / eps, e2 = eps * eps;
  for (int j = 0; j < n; ++j) {
    const double Kj = std::pow(K, j);
    const double max_rad = j == 0 ? kHalfPi : e2 / (std::pow(K, j - 1) * Kj);
    auto balls = level_balls(src, I, K, j, max_rad, [&](double l) { return e2 / (l * Kj); });
    if (covered_measure(I, balls) > 0.0) return false;
    // Touching at a single point still meets I.
    for (const auto& b : balls) {
      if (b.hi >= I.lo && b.lo <= I.hi) return false;
    }
  }
  return true;
}

double delta_measure(const RecordSource& src, const Interval& I, double eps, int n, double delta) {
  const double K = 1.0 / eps;
  const double Kn = std::pow(K, n);
  const double max_rad = n == 0 ? kHalfPi : delta / (std::pow(K, n - 1) * Kn);
  auto balls = level_balls(src, I, K, n, max_rad, [&](double l) { return delta / (l * Kn); });
  return covered_measure(I, std::move(balls));
}

PropertyReport decaying_check(const RecordSource& src, const DecayingParams& p) {
  if (!(p.eps > 0.0) || !(p.eps < 1.0)) throw Error(ErrorKind::ConfigError, "decaying needs 0 < eps < 1");
  if (p.n_max < 1) throw Error(ErrorKind::ConfigError, "decaying needs n_max >= 1");
  if (p.theorem_mode) {
    if (!(p.r0 > 0.0) || !(p.sys > 0.0) || !(p.eps < std::min(p.r0, p.sys))) {
      throw Error(ErrorKind::HypothesisNotMet, "theorem mode needs 0 < eps < min(r0, sys(X))", p.eps);
    }
  }
  PropertyReport rep;
  rep.property = "DEC";
  rep.mode = p.theorem_mode ? "theorem" : "empirical";
  const double K = 1.0 / p.eps, e2 = p.eps * p.eps;
  rep.constants["eps"] = p.eps;
  rep.constants["K"] = K;
  rep.constants["beta"] = p.beta;

  // Existence of an admissible first-level interval, over the whole grid.
  {
    const double len = 1.0 / (K * K);
    const auto cells = static_cast<std::size_t>(std::floor(kPi / len));
    std::size_t admissible = 0;
    for (std::size_t i = 0; i < cells; ++i) {
      Interval I{-kHalfPi + i * len, -kHalfPi + (i + 1) * len};
      if (decaying_admissible(src, I, p.eps, 1)) ++admissible;
    }
    rep.constants["admissible_n1"] = static_cast<double>(admissible);
    if (admissible == 0) rep.notes.push_back("NoAdmissibleInterval: no admissible interval at n=1");
  }

  std::mt19937_64 rng(p.seed);
  double max_ratio = 0.0;
  for (int n = 1; n <= p.n_max; ++n) {
    const double len = std::pow(K, -2.0 * n);
    const double cells = std::floor(kPi / len);
    std::uniform_real_distribution<double> U01(0.0, 1.0);
    std::size_t found = 0, draws = 0;
    double level_max = 0.0;
    while (found < p.samples && draws < p.max_draws) {
      ++draws;
      double idx = std::floor(U01(rng) * cells);
      Interval I{-kHalfPi + idx * len, -kHalfPi + (idx + 1.0) * len};
      if (!decaying_admissible(src, I, p.eps, n)) {
        ++rep.skipped;
        continue;
      }
      ++found;
      ++rep.samples;
      double ratio = delta_measure(src, I, p.eps, n, 2.0 * e2) / len;
      level_max = std::max(level_max, ratio);
    }
    rep.constants["max_ratio_n" + std::to_string(n)] = level_max;
    rep.constants["admissible_found_n" + std::to_string(n)] = static_cast<double>(found);
    if (found == 0) rep.notes.push_back("no admissible interval sampled at n=" + std::to_string(n));
    max_ratio = std::max(max_ratio, level_max);
  }
  rep.fitted = max_ratio / std::pow(p.eps, p.beta);
  rep.constants["M_fit"] = rep.fitted;
  return rep;
}

// ---------------------------------------------------------------------------
// Horocycle systole

double horocycle_closed_form(Vec2 hol, double K, double lambda, double alpha) {
  const double Kl = std::pow(K, lambda);
  const double im = std::abs(hol.y);
  const double ag = hol.x / hol.y;
  return std::hypot(Kl * im * std::abs(alpha - ag), im / Kl);
}

double horocycle_direct(Vec2 hol, double K, double lambda, double alpha) {
  Mat2 G = geodesic_matrix(lambda * std::log(K)) * horocycle_matrix(-alpha);
  return (G * hol).norm();
}

HorocycleResult horocycle_systole_fraction(const TranslationSurface& X, Interval J, double rho, double rho_prime,
                                           std::size_t samples, double beta) {
  const double s0 = X.S0() * std::sqrt(X.area());
  if (!(rho_prime > 0.0) || rho_prime > rho || !(rho < s0)) {
    throw Error(ErrorKind::HypothesisNotMet, "need 0 < rho' <= rho < S0", rho);
  }
  if (!(J.length() > 0.0) || samples == 0) throw Error(ErrorKind::ConfigError, "empty horocycle window");
  // |u_{-alpha} v| >= |v| / ||u_alpha||, so longer vectors never matter.
  const double amax = std::max(std::abs(J.lo), std::abs(J.hi));
  const double unorm = horocycle_matrix(amax).op_norm();
  const double a0 = J.contains(0.0) ? 0.0 : (std::abs(J.lo) < std::abs(J.hi) ? J.lo : J.hi);
  const double enum_len = std::max(rho * horocycle_matrix(a0).op_norm(), rho_prime * unorm);
  std::vector<Vec2> vs;
  for (const auto& sc : enumerate_saddle_connections(X, enum_len)) vs.push_back(sc.holonomy);

  HorocycleResult res;
  res.samples = samples;
  res.min_sup = kInf;
  for (auto v : vs) {
    // The norm is convex in alpha, so the sup over J sits at an endpoint.
    double sup = std::max((horocycle_matrix(-J.lo) * v).norm(), (horocycle_matrix(-J.hi) * v).norm());
    res.min_sup = std::min(res.min_sup, sup);
  }
  res.hypothesis_ok = res.min_sup >= rho;
  if (!res.hypothesis_ok) {
    throw Error(ErrorKind::HypothesisNotMet, "some saddle connection stays shorter than rho on J", res.min_sup);
  }
  std::vector<char> hit(samples, 0);
  parallel_for(samples, 0, [&](std::size_t i) {
    // Stratified: one sample per cell at a hashed offset, deterministic.
    double u = std::fmod(0.5 + 0.6180339887498949 * static_cast<double>(i), 1.0);
    double alpha = J.lo + (static_cast<double>(i) + u) * J.length() / static_cast<double>(samples);
    Mat2 h = horocycle_matrix(-alpha);
    for (auto v : vs) {
      if ((h * v).norm() <= rho_prime) {
        hit[i] = 1;
        break;
      }
    }
  });
  std::size_t count = 0;
  for (char c : hit) count += c;
  res.fraction = static_cast<double>(count) / static_cast<double>(samples);
  const double ratio = std::pow(rho_prime / rho, beta);
  res.bound_rhs = ratio;
  res.C_fit = res.fraction / ratio;
  return res;
}

}  // namespace flatdio
