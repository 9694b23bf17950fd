#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flatdio/intervals.hpp"
#include "flatdio/scan.hpp"
#include "json.hpp"

namespace flatdio {

// Decreasing function psi on (0, inf).
struct ApproximationFunction {
  enum class Family { power, power_log, constant, table };
  Family family = Family::power;
  double c = 1.0;
  double tau = 2.0;
  double sigma = 0.0;
  // For `table`: (t, psi) knots with increasing t; log-log interpolation,
  // constant extrapolation on both sides.
  std::vector<std::pair<double, double>> knots;

  double operator()(double t) const;
  std::string describe() const;

  // c t^-tau.
  static ApproximationFunction power(double tau, double c = 1.0);
  // c t^-tau max(1, ln t)^-sigma.
  static ApproximationFunction power_log(double tau, double sigma, double c = 1.0);
  // t^-tau (ln t)^-(1+eps) tau / 2.
  static ApproximationFunction psi_tau_eps(double tau, double eps);
  static ApproximationFunction constant(double value);
  static ApproximationFunction table(std::vector<std::pair<double, double>> knots);
};

struct DimensionFunction {
  enum class Family { power, identity, table };
  Family family = Family::identity;
  double s = 1.0;
  std::vector<std::pair<double, double>> knots;

  double operator()(double r) const;
  std::string describe() const;

  static DimensionFunction power(double s);
  static DimensionFunction identity();
  static DimensionFunction table(std::vector<std::pair<double, double>> knots);
};

struct Violation {
  std::string where;
  double value = 0.0;
  double bound = 0.0;
};

struct PropertyReport {
  std::string property;  // QG, IQG, U, DIR, DEC
  std::string mode;      // theorem | empirical
  std::map<std::string, double> constants;
  std::size_t samples = 0;
  std::size_t skipped = 0;  // samples outside the property's hypothesis
  std::vector<Violation> violations;
  double fitted = 0.0;
  std::vector<std::string> notes;

  bool pass() const { return violations.empty(); }
  nlohmann::json to_json() const;
};

// n -> records with K^(n-1) < l <= K^n; bucket 0 holds l <= 1.
int partition_index(double l, double K);
std::map<int, std::vector<ResonantRecord>> partition(const ResonantSet& R, double K);

struct DirichletResult {
  double theta_v = 0.0;
  double l = 0.0;
  Vec2 rep;
  double distance = 0.0;  // |theta - theta_v| on R / pi Z
  double bound = 0.0;     // sqrt(2) S0^2 / (l L)
  bool bound_ok = false;
};

// Argmin of |theta - theta_v| * l over records with l <= L. `bound_const` is
// the numerator of the guaranteed bound (sqrt(2) S0^2 for saddle connections).
// Throws EmptyTruncation.
DirichletResult dirichlet_search(const ResonantSet& R, double theta, double L, double bound_const);

// Surface version: checks L > sqrt(2) S0^2 / sys (HypothesisNotMet) and
// searches a strip around theta, widening it until the minimum is certified.
// `sys` <= 0 computes the systole. Cylinder mode checks L > sqrt(2) T0^2 / cyl.
DirichletResult dirichlet_search(const TranslationSurface& X, double theta, double L, double sys = 0.0,
                                 ResonantKind kind = ResonantKind::sc);

// Records with l <= L and |theta - theta_v| <= psi(l), sorted by l.
std::vector<ResonantRecord> approx_solutions(const ResonantSet& R, double theta, const ApproximationFunction& psi,
                                             double L);

// min over L0 < l <= L of l^2 |theta - theta_v|; +inf when no record qualifies.
double bad_margin(const ResonantSet& R, double theta, double L0, double L);

// Fitted M = max count(l < r) / r^2 over the radii. A positive `bound`
// turns counts >= bound r^2 into violations.
PropertyReport qg_check(const ResonantSet& R, const std::vector<double>& radii, double bound = 0.0);

struct IntervalSample {
  Interval I;
  double L = 0.0;
};

// Counts #{theta in I, l < L} against bound |I| L^2; samples with
// L^2 |I| < 1 are skipped. `bound` <= 0 uses m(m+1).
PropertyReport iqg_check(const ResonantSet& R, const std::vector<IntervalSample>& samples, double bound = 0.0);

// Random intervals inside [-pi/2, pi/2) with lengths log-uniform in
// [min_len, max_len], paired with the given radii in turn.
std::vector<IntervalSample> random_interval_samples(std::uint64_t seed, std::size_t count, double min_len,
                                                    double max_len, const std::vector<double>& radii);

struct UbiquityParams {
  double K = 10.0;
  std::vector<int> n_values{1, 2};
  double a = 0.0;   // <= 0 selects sqrt(3) K
  double c1 = 0.5;
  double cyl = 0.0;  // cyl(X); > 0 enables the interval-size hypothesis
  bool theorem_mode = false;
  double T0 = 0.0;
};

// Covered fraction |I cap U_{l <= K^n} B(theta, a / K^2n)| / |I| per sample.
PropertyReport ubiquity_check(const ResonantSet& R, const UbiquityParams& p, const std::vector<Interval>& intervals);

struct DirichletPropertyParams {
  double eps = 0.5;
  double U = 0.0;    // <= 0 selects 12 / (m^2 eps^2)
  double tau = 0.0;  // <= 0 selects m eps^2 / sqrt(48)
  double sys = 0.0;  // > 0 enables the L >= sqrt(2) S0^2 / sys hypothesis
  double S0 = 0.0;
};

// Covered fraction by balls B(theta, eps^2 / 2 l^2), l <= L, per (I, L).
// Throws HypothesisNotMet for a sample with |I| < 2U / L^2 or L too small.
PropertyReport dirichlet_property_check(const ResonantSet& R, const DirichletPropertyParams& p,
                                        const std::vector<IntervalSample>& samples);

// Supplies the records needed near a window: all records with l <= L and
// direction within `halfwidth` of `center`.
using RecordSource = std::function<std::vector<ResonantRecord>(double center, double halfwidth, double L)>;
RecordSource source_from_set(const ResonantSet& R);
// Square torus records from the lattice walk.
RecordSource source_from_torus_lattice();
// Window scans with `threads` workers (1 suits callers that parallelize).
RecordSource source_from_surface(const TranslationSurface& X, int threads = 1);

// Records of length <= L whose ball of radius rad(l) can meet the window
// [center - half, center + half], for rad non-increasing in l. Lengths are
// fetched in dyadic shells so that long records come from narrow windows; the
// few records with l < 1 are fetched over the whole circle.
std::vector<ResonantRecord> records_near(const RecordSource& src, double center, double half, double L,
                                         const std::function<double(double)>& rad);

struct DecayingParams {
  double eps = 0.1;
  int n_max = 3;
  std::size_t samples = 200;  // admissible intervals per n
  std::uint64_t seed = 0;
  bool theorem_mode = false;
  double r0 = 0.0;   // theorem mode requires eps < min(r0, sys)
  double sys = 0.0;
  double beta = 1.0;  // exponent in tau = M eps^beta
  std::size_t max_draws = 200000;
};

// Returns the fitted M with mass <= M eps^beta |I| over admissible intervals.
PropertyReport decaying_check(const RecordSource& src, const DecayingParams& p);

// True when I (|I| = K^-2n) avoids the balls eps^2 / (l K^j), theta in R(K, j), j < n.
bool decaying_admissible(const RecordSource& src, const Interval& I, double eps, int n);

// |I cap Delta(K, n, delta)| with Delta the union of B(theta, delta / (l K^n)), theta in R(K, n).
double delta_measure(const RecordSource& src, const Interval& I, double eps, int n, double delta);

struct HorocycleResult {
  double fraction = 0.0;
  double bound_rhs = 0.0;  // C (rho' / rho)^beta |J| / |J| with C = 1
  double C_fit = 0.0;      // fraction / (rho'/rho)^beta
  std::size_t samples = 0;
  bool hypothesis_ok = false;
  double min_sup = 0.0;  // min over gamma of sup_alpha |hol(gamma, u_-alpha X)|
};

// Stratified sampling of alpha in J; sys(u_{-alpha} X) from enumerated
// saddle connections. Throws HypothesisNotMet if some gamma stays below rho on J.
HorocycleResult horocycle_systole_fraction(const TranslationSurface& X, Interval J, double rho, double rho_prime,
                                           std::size_t samples, double beta = 1.0);

// sqrt((K^lambda |Im| |alpha - alpha_gamma|)^2 + (|Im| / K^lambda)^2), alpha_gamma = Re / Im.
double horocycle_closed_form(Vec2 hol, double K, double lambda, double alpha);
// |G_lambda u_{-alpha} hol| computed with matrices.
double horocycle_direct(Vec2 hol, double K, double lambda, double alpha);

}  // namespace flatdio
