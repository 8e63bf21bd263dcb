#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace twistrec {

// Directed double-precision interval; one ulp of outward padding per op
// keeps the enclosures sound without pulling MPFR into measure arithmetic.
inline double dir_up(double v) { return std::nextafter(v, 1e300); }
inline double dir_down(double v) { return std::nextafter(v, -1e300); }

struct Ival {
  double lo = 0.0, hi = 0.0;
  static Ival exact(double v) { return {v, v}; }
  static Ival of(double lo, double hi) { return {lo, hi}; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

Ival iv_add(const Ival& a, const Ival& b);
Ival iv_sub(const Ival& a, const Ival& b);
Ival iv_mul(const Ival& a, const Ival& b);  // requires nonnegative operands
Ival iv_div(const Ival& a, const Ival& b);  // requires positive b.lo
Ival iv_abs_sub(const Ival& a, const Ival& b);  // | a - b | as an interval
Ival iv_clamp01(const Ival& a);

// Wilson score interval for a binomial proportion.
struct WilsonCI {
  double mean = 0.0;
  double stderr_ = 0.0;
  double lo = 0.0, hi = 1.0;
};
WilsonCI wilson(long successes, long n, double z);

// Normal-approximation sigma of a proportion (used for "k sigma" checks).
double proportion_sigma(double p, long n);

// Fixed-order pairwise summation; deterministic for a given input order.
double pairwise_sum(const std::vector<double>& v);

}  // namespace twistrec
