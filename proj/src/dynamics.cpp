#include "flatdio/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatdio/errors.hpp"
#include "flatdio/parallel.hpp"

namespace flatdio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// In s = e^4t the curve e^2t A + e^-2t B, multiplied by e^2t, becomes the line
// A s + B. Multiplying by a positive factor keeps the ordering, so the
// envelope is a lower hull of lines.
struct Line {
  long double A, B;
  Vec2 hol;
  double re, im;
};

// l2 is never strictly below both neighbours (slopes A1 > A2 > A3).
bool redundant(const Line& l1, const Line& l2, const Line& l3) {
  return (l3.B - l1.B) * (l1.A - l2.A) <= (l2.B - l1.B) * (l1.A - l3.A);
}

long double crossing(const Line& l1, const Line& l2) { return (l2.B - l1.B) / (l1.A - l2.A); }

double strip_rad(double S0, double l) { return l <= S0 ? kHalfPi : std::asin(S0 / l); }

void check_unit_area(const TranslationSurface& X) {
  if (std::abs(X.area() - 1.0) > 1e-9) throw Error(ErrorKind::NotUnitArea, "surface must have area 1", X.area());
}

std::vector<Vec2> strip_holonomies(const TranslationSurface& X, double theta, double S0, double im_max) {
  ScanRegion r;
  r.use_box = true;
  r.box_theta = theta;
  r.box_re = S0;
  r.box_im = im_max;
  r.max_length = std::hypot(S0, im_max) * (1.0 + 1e-12);
  std::vector<Vec2> out;
  for (const auto& sc : enumerate_in_region(X, r)) out.push_back(sc.holonomy);
  return out;
}

std::vector<Vec2> strip_holonomies(const RecordSource& src, double theta, double S0, double im_max) {
  std::vector<Vec2> out;
  double L = std::hypot(S0, im_max);
  for (const auto& r : records_near(src, theta, 0.0, L, [S0](double l) { return strip_rad(S0, l); })) {
    auto h = holonomy_components(theta, r.rep);
    if (std::abs(h.re) <= S0 && std::abs(h.im) <= im_max) out.push_back(r.rep);
  }
  return out;
}

DaniResult dani_from_holonomies(const std::vector<Vec2>& hols, double S0, double theta, double L, double T,
                                double L0) {
  DaniResult d;
  d.L = L;
  d.T = T;
  d.L0 = L0;
  d.candidates = hols.size();
  d.angle_form = d.re_im_form = kInf;
  for (Vec2 v : hols) {
    auto h = holonomy_components(theta, v);
    double l = v.norm();
    if (std::abs(h.re) <= 1e-12 * l) throw Error(ErrorKind::ResonantDirection, "theta is a saddle direction", theta);
    double aim = std::abs(h.im);
    if (aim > L0 && aim <= L) d.re_im_form = std::min(d.re_im_form, std::abs(h.re) * aim);
  }
  // Parallel copies are longer, so the records carry the angle form.
  double Lmax = 0.0;
  for (Vec2 v : hols) Lmax = std::max(Lmax, v.norm());
  for (const auto& r : resonant_from_vectors(hols, Lmax, ResonantKind::sc).records) {
    if (r.l > L0 && r.l <= L) d.angle_form = std::min(d.angle_form, direction_distance(theta, r.theta) * r.l * r.l);
  }
  auto trace = envelope_from_holonomies(theta, hols, T);
  double s = trace.min_on(std::log(L0), T).second;
  d.sys_form = 0.5 * s * s;
  double hi = std::max({d.angle_form, d.re_im_form, d.sys_form});
  double lo = std::min({d.angle_form, d.re_im_form, d.sys_form});
  d.gap = hi - lo;
  d.certified = hi <= S0 * L0;
  return d;
}

void dani_defaults(double L, double& T, double& L0) {
  if (!(L > 1.0)) throw Error(ErrorKind::ConfigError, "Dani check needs L > 1", L);
  if (T <= 0.0) T = std::log(L);
  if (L0 <= 0.0) L0 = std::sqrt(L);
  if (!(L0 < L) || !(std::log(L0) < T)) throw Error(ErrorKind::ConfigError, "Dani check needs L0 < L and log L0 < T");
}

}  // namespace

double GeodesicEvent::sys_at(double t) const {
  return std::sqrt(re * re * std::exp(2.0 * t) + im * im * std::exp(-2.0 * t));
}

double GeodesicEvent::argmin(double a, double b) const {
  double lo = std::max(a, t0), hi = std::min(b, t1);
  if (lo > hi) return lo;
  double ts;
  if (re == 0.0) ts = kInf;
  else if (im == 0.0) ts = -kInf;
  else ts = 0.5 * (std::log(std::abs(im)) - std::log(std::abs(re)));
  return std::clamp(ts, lo, hi);
}

double GeodesicTrace::sys(double t) const {
  auto it = std::lower_bound(events.begin(), events.end(), t, [](const GeodesicEvent& e, double v) { return e.t1 < v; });
  if (it == events.end()) --it;
  return it->sys_at(t);
}

std::pair<double, double> GeodesicTrace::min_on(double a, double b) const {
  std::pair<double, double> best{a, kInf};
  for (const auto& e : events) {
    if (e.t1 < a || e.t0 > b) continue;
    double t = e.argmin(a, b);
    double s = e.sys_at(t);
    if (s < best.second) best = {t, s};
  }
  return best;
}

GeodesicTrace envelope_from_holonomies(double theta, const std::vector<Vec2>& hols, double T) {
  if (hols.empty()) throw Error(ErrorKind::EmptyTruncation, "no candidate saddle connections");
  if (!(T > 0.0)) throw Error(ErrorKind::ConfigError, "horizon must be positive", T);
  std::vector<Line> lines;
  lines.reserve(hols.size());
  for (Vec2 v : hols) {
    auto h = holonomy_components(theta, v);
    lines.push_back({static_cast<long double>(h.re) * h.re, static_cast<long double>(h.im) * h.im, v, h.re, h.im});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
    if (x.A != y.A) return x.A > y.A;
    return x.B < y.B;
  });
  std::vector<Line> hull;
  for (const auto& ln : lines) {
    if (!hull.empty() && hull.back().A == ln.A) continue;
    while (hull.size() >= 2 && redundant(hull[hull.size() - 2], hull.back(), ln)) hull.pop_back();
    hull.push_back(ln);
  }
  GeodesicTrace tr;
  tr.theta = theta;
  tr.T = T;
  tr.candidates = hols.size();
  const long double s_hi = std::exp(4.0L * T);
  long double from = -std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    long double to = i + 1 < hull.size() ? crossing(hull[i], hull[i + 1]) : std::numeric_limits<long double>::infinity();
    long double lo = std::max(from, 1.0L), hi = std::min(to, s_hi);
    from = to;
    if (lo >= hi) continue;
    GeodesicEvent e;
    e.t0 = static_cast<double>(0.25L * std::log(lo));
    e.t1 = static_cast<double>(0.25L * std::log(hi));
    e.hol = hull[i].hol;
    e.re = hull[i].re;
    e.im = hull[i].im;
    tr.events.push_back(e);
  }
  tr.events.front().t0 = 0.0;
  tr.events.back().t1 = T;
  for (std::size_t i = 1; i < tr.events.size(); ++i) tr.events[i].t0 = tr.events[i - 1].t1;
  return tr;
}

GeodesicTrace sys_along_geodesic(const TranslationSurface& X, double theta, double T) {
  check_unit_area(X);
  const double S0 = X.S0();
  const double bound = S0 * std::exp(T);
  auto tr = envelope_from_holonomies(theta, strip_holonomies(X, theta, S0, bound), T);
  tr.enumeration_bound = bound;
  return tr;
}

GeodesicTrace sys_along_geodesic(const RecordSource& src, double theta, double T, double S0) {
  const double bound = S0 * std::exp(T);
  auto tr = envelope_from_holonomies(theta, strip_holonomies(src, theta, S0, bound), T);
  tr.enumeration_bound = bound;
  return tr;
}

DaniResult dani_correspondence_check(const TranslationSurface& X, double theta, double L, double T, double L0) {
  check_unit_area(X);
  dani_defaults(L, T, L0);
  const double S0 = X.S0();
  return dani_from_holonomies(strip_holonomies(X, theta, S0, std::max(L, S0 * std::exp(T))), S0, theta, L, T, L0);
}

DaniResult dani_correspondence_check(const RecordSource& src, double S0, double theta, double L, double T,
                                     double L0) {
  dani_defaults(L, T, L0);
  return dani_from_holonomies(strip_holonomies(src, theta, S0, std::max(L, S0 * std::exp(T))), S0, theta, L, T, L0);
}

bool bad_dyn_proxy(const GeodesicTrace& trace, double eps, double t0) {
  return trace.min_on(t0, trace.T).second >= eps;
}

bool bad_dyn_proxy(const TranslationSurface& X, double theta, double eps, double T, double t0) {
  return bad_dyn_proxy(sys_along_geodesic(X, theta, T), eps, t0);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

bool phi_integral_diverges(const ApproximationFunction& phi) {
  using F = ApproximationFunction::Family;
  switch (phi.family) {
    case F::power:
      return phi.tau <= 1.0;
    case F::power_log:
      return phi.tau < 1.0 || (phi.tau == 1.0 && phi.sigma <= 1.0);
    case F::constant:
      return phi.c > 0.0;
    case F::table:
      return !phi.knots.empty() && phi.knots.back().second > 0.0;
  }
  return true;
}

double phi_scale(const ApproximationFunction& phi) { return phi_integral_diverges(phi) ? 1.0 / 1.02 : 1.0; }

KhinchinStatistic khinchin_statistic(const RecordSource& src, const std::vector<double>& thetas,
                                     const KhinchinStatParams& params) {
  KhinchinStatParams p = params;
  if (p.a <= 0.0) p.a = phi_scale(p.phi);
  if (!(p.a > 0.0) || !(p.T > 0.0)) throw Error(ErrorKind::ConfigError, "Khinchin statistic needs a > 0 and T > 0");
  if (p.with_sys && !(p.S0 > 0.0)) throw Error(ErrorKind::ConfigError, "Khinchin statistic needs S0 for sys");
  const double L = p.L > 0.0 ? p.L : std::exp(p.a * p.T);
  // |Re| < l psi(l) = phi(ln l / a) / l.
  auto bound = [&](double l) { return p.phi(std::log(l) / p.a) / l; };
  auto rad = [&](double l) {
    if (l <= 1.0) return kHalfPi;
    double x = bound(l) / l;
    return x >= 1.0 ? kHalfPi : std::asin(x);
  };
  KhinchinStatistic out;
  out.L = L;
  out.a = p.a;
  out.samples.resize(thetas.size());
  parallel_for(thetas.size(), p.threads, [&](std::size_t i) {
    KhinchinSample s;
    s.theta = thetas[i];
    for (const auto& r : records_near(src, s.theta, 0.0, L, rad)) {
      if (r.l <= 1.0) continue;
      if (std::abs(holonomy_components(s.theta, r.rep).re) < bound(r.l)) {
        ++s.count;
        s.last_length = std::max(s.last_length, r.l);
      }
    }
    if (p.with_sys) {
      auto tr = sys_along_geodesic(src, s.theta, p.T, p.S0);
      s.min_ratio = kInf;
      auto consider = [&](const GeodesicEvent& e, double t) {
        double v = e.sys_at(t) / std::sqrt(p.phi(t));
        if (v < s.min_ratio) {
          s.min_ratio = v;
          s.t_min = t;
        }
      };
      for (const auto& e : tr.events) {
        double lo = std::max(e.t0, p.t_burn), hi = e.t1;
        if (lo > hi) continue;
        consider(e, e.argmin(lo, hi));
        const int n = 32;
        for (int k = 0; k <= n; ++k) consider(e, lo + (hi - lo) * k / n);
      }
    }
    out.samples[i] = s;
  });
  std::vector<double> counts, ratios;
  for (const auto& s : out.samples) {
    counts.push_back(static_cast<double>(s.count));
    ratios.push_back(s.min_ratio);
  }
  out.median_count = quantile(counts, 0.5);
  out.q25_count = quantile(counts, 0.25);
  out.q75_count = quantile(counts, 0.75);
  out.median_ratio = quantile(ratios, 0.5);
  return out;
}

double log_law_exponent(const GeodesicTrace& trace, double alpha) {
  const double e = std::exp(1.0);
  if (trace.T < e * e) throw Error(ErrorKind::ConfigError, "log-law statistic needs T >= e^2", trace.T);
  double best = -kInf;
  for (const auto& ev : trace.events) {
    if (ev.t1 < e) continue;
    double t = ev.argmin(e, trace.T);
    best = std::max(best, (-std::log(ev.sys_at(t)) - alpha * t) / std::log(t));
  }
  return best;
}

double log_law_exponent(const TranslationSurface& X, double theta, double T, double alpha) {
  return log_law_exponent(sys_along_geodesic(X, theta, T), alpha);
}

std::vector<WTauSolutions> w_tau_membership_scan(const RecordSource& src, const std::vector<double>& thetas,
                                                 double tau, double eps, double L, int threads) {
  if (tau < 2.0) throw Error(ErrorKind::ConfigError, "W(tau, eps) needs tau >= 2", tau);
  auto psi = ApproximationFunction::psi_tau_eps(tau, eps);
  auto rad = [&](double l) { return std::min(kHalfPi, psi(l)); };
  std::vector<WTauSolutions> out(thetas.size());
  parallel_for(thetas.size(), threads, [&](std::size_t i) {
    WTauSolutions w;
    w.theta = thetas[i];
    for (const auto& r : records_near(src, w.theta, 0.0, L, rad)) {
      if (direction_distance(w.theta, r.theta) <= psi(r.l)) w.solutions.push_back(r);
    }
    std::sort(w.solutions.begin(), w.solutions.end(),
              [](const ResonantRecord& a, const ResonantRecord& b) { return a.l < b.l; });
    if (!w.solutions.empty()) w.last_length = w.solutions.back().l;
    out[i] = std::move(w);
  });
  return out;
}

}  // namespace flatdio
