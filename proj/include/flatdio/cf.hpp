#pragma once

#include <cstdint>
#include <vector>

namespace flatdio {

// Continued fractions [a0; a1, a2, ...]. Used to design directions with a
// prescribed approximation exponent and as an independent oracle in tests.

// Value of [a0; a1, ..., an], evaluated from the tail in long double.
double cf_value(const std::vector<double>& quotients);

// First `count` partial quotients of x (stops early on exact rationals).
std::vector<std::int64_t> cf_expand(double x, int count);

struct Convergent {
  double p = 0.0;
  double q = 0.0;
};

// Convergents p_k/q_k of [a0; a1, ...], computed with the usual recurrence.
std::vector<Convergent> cf_convergents(const std::vector<double>& quotients);

// Golden mean slope 1/phi = [0; 1, 1, 1, ...].
double golden_slope();

// Slope [0; a1, a2, ...] with a_{k+1} = base^(2^k): with base 10 this gives
// [0; 10, 10^2, 10^4, ...], whose approximation exponent tends to 3.
double doubly_exponential_slope(double base, int terms);

// Quotients [0; prefix..., a_k...] with a_{k+1} = max(1, round(q_k^(tau - 2))),
// extended while q_k <= q_max. tau = 2 continues with ones.
std::vector<double> designed_quotients(const std::vector<double>& prefix, double tau, double q_max);

}  // namespace flatdio
