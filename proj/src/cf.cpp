#include "flatdio/cf.hpp"

#include <algorithm>
#include <cmath>

namespace flatdio {

double cf_value(const std::vector<double>& quotients) {
  if (quotients.empty()) return 0.0;
  long double x = quotients.back();
  for (std::size_t i = quotients.size() - 1; i-- > 0;) {
    x = static_cast<long double>(quotients[i]) + 1.0L / x;
  }
  return static_cast<double>(x);
}

std::vector<std::int64_t> cf_expand(double x, int count) {
  std::vector<std::int64_t> out;
  long double r = x;
  for (int i = 0; i < count; ++i) {
    long double a = std::floor(r);
    out.push_back(static_cast<std::int64_t>(a));
    long double frac = r - a;
    if (frac < 1e-15L) break;
    r = 1.0L / frac;
    if (r > 9e15L) break;
  }
  return out;
}

std::vector<Convergent> cf_convergents(const std::vector<double>& quotients) {
  std::vector<Convergent> out;
  double p_prev = 1.0, q_prev = 0.0;
  double p = 0.0, q = 1.0;
  bool first = true;
  for (double a : quotients) {
    if (first) {
      p = a;
      q = 1.0;
      p_prev = 1.0;
      q_prev = 0.0;
      first = false;
    } else {
      double pn = a * p + p_prev, qn = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    out.push_back({p, q});
  }
  return out;
}

double golden_slope() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double doubly_exponential_slope(double base, int terms) {
  std::vector<double> a{0.0};
  double v = base;
  for (int k = 0; k < terms; ++k) {
    a.push_back(v);
    v = v * v;
  }
  return cf_value(a);
}

std::vector<double> designed_quotients(const std::vector<double>& prefix, double tau, double q_max) {
  std::vector<double> a{0.0};
  a.insert(a.end(), prefix.begin(), prefix.end());
  for (;;) {
    double q = cf_convergents(a).back().q;
    if (q > q_max) break;
    a.push_back(std::max(1.0, std::round(std::pow(q, tau - 2.0))));
  }
  return a;
}

}  // namespace flatdio
