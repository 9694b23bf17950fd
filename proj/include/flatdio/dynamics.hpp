#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "flatdio/resonant.hpp"
#include "flatdio/scan.hpp"
#include "flatdio/surface.hpp"

namespace flatdio {

// On [t0, t1] the systole of g_t r_theta X is realized by `hol`:
// sys(t)^2 = e^2t re^2 + e^-2t im^2.
struct GeodesicEvent {
  double t0 = 0.0;
  double t1 = 0.0;
  Vec2 hol;
  double re = 0.0;
  double im = 0.0;

  double sys_at(double t) const;
  // Argmin of sys on [a, b] intersected with the event interval.
  double argmin(double a, double b) const;
};

struct GeodesicTrace {
  double theta = 0.0;
  double T = 0.0;
  double enumeration_bound = 0.0;  // e^T S0
  std::size_t candidates = 0;
  std::vector<GeodesicEvent> events;  // consecutive, covering [0, T]

  double sys(double t) const;
  // (t, sys(t)) minimizing sys over [a, b].
  std::pair<double, double> min_on(double a, double b) const;
};

// Exact lower envelope of the curves of `hols` on [0, T].
GeodesicTrace envelope_from_holonomies(double theta, const std::vector<Vec2>& hols, double T);

// Candidates are the saddle connections with |Re| <= S0 and |gamma| <= e^T S0.
// Requires unit area (NotUnitArea); throws BudgetExceeded.
GeodesicTrace sys_along_geodesic(const TranslationSurface& X, double theta, double T);
// Same candidates drawn from a record source; parallel longer connections
// never realize the systole, so records suffice.
GeodesicTrace sys_along_geodesic(const RecordSource& src, double theta, double T, double S0);

struct DaniResult {
  double angle_form = 0.0;  // min |theta - theta_v| l^2 over L0 < l <= L
  double re_im_form = 0.0;  // min |Re| |Im| over L0 < |Im| <= L
  double sys_form = 0.0;    // min sys^2 / 2 over log L0 <= t <= T
  double gap = 0.0;         // largest pairwise difference
  double L0 = 0.0;
  double L = 0.0;
  double T = 0.0;
  std::size_t candidates = 0;
  bool certified = true;  // all three minima fall below S0 L0
};

// T <= 0 selects log L, L0 <= 0 selects sqrt(L). Throws ResonantDirection when
// a candidate is parallel to theta.
DaniResult dani_correspondence_check(const TranslationSurface& X, double theta, double L, double T = 0.0,
                                     double L0 = 0.0);
DaniResult dani_correspondence_check(const RecordSource& src, double S0, double theta, double L, double T = 0.0,
                                     double L0 = 0.0);

// min of sys over [t0, T] is >= eps.
bool bad_dyn_proxy(const GeodesicTrace& trace, double eps, double t0 = 1.0);
bool bad_dyn_proxy(const TranslationSurface& X, double theta, double eps, double T, double t0 = 1.0);

struct KhinchinStatParams {
  ApproximationFunction phi = ApproximationFunction::power(1.0);
  double T = 10.0;
  double a = 0.0;       // psi(s) = phi(ln s / a) / s^2; <= 0 selects phi_scale(phi)
  double L = 0.0;       // count truncation; <= 0 selects e^(a T)
  double t_burn = 1.0;  // sys / sqrt(phi) is minimized over [t_burn, T]
  bool with_sys = true;
  double S0 = 0.0;  // needed when with_sys
  int threads = 0;
};

struct KhinchinSample {
  double theta = 0.0;
  double min_ratio = 0.0;  // min sys(t) / sqrt(phi(t))
  double t_min = 0.0;
  std::size_t count = 0;  // records with 1 < l <= L and |Re| < l psi(l)
  double last_length = 0.0;
};

struct KhinchinStatistic {
  std::vector<KhinchinSample> samples;
  double median_count = 0.0;
  double q25_count = 0.0;
  double q75_count = 0.0;
  double median_ratio = 0.0;
  double L = 0.0;
  double a = 0.0;
};

// Whether the integral of phi over [1, inf) diverges. Tables extend their last
// value, so a positive tail diverges.
bool phi_integral_diverges(const ApproximationFunction& phi);
// 1 / 1.02 when the integral of phi diverges, 1 otherwise.
double phi_scale(const ApproximationFunction& phi);

KhinchinStatistic khinchin_statistic(const RecordSource& src, const std::vector<double>& thetas,
                                     const KhinchinStatParams& p);

// max over event minima in [e, T] of (-log sys - alpha t) / log t. Throws
// ConfigError for T < e^2.
double log_law_exponent(const GeodesicTrace& trace, double alpha);
double log_law_exponent(const TranslationSurface& X, double theta, double T, double alpha);

struct WTauSolutions {
  double theta = 0.0;
  std::vector<ResonantRecord> solutions;  // sorted by l
  double last_length = 0.0;                // 0 when there is none
};

// Records with l <= L and |theta - theta_v| <= psi_{tau,eps}(l). Throws
// ConfigError for tau < 2.
std::vector<WTauSolutions> w_tau_membership_scan(const RecordSource& src, const std::vector<double>& thetas,
                                                 double tau, double eps, double L, int threads = 0);

// Quantile by linear interpolation of the sorted values.
double quantile(std::vector<double> v, double q);

}  // namespace flatdio
