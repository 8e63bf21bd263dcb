#include "twistrec/stats.hpp"

#include "twistrec/errors.hpp"

namespace twistrec {

Ival iv_add(const Ival& a, const Ival& b) {
  return {dir_down(a.lo + b.lo), dir_up(a.hi + b.hi)};
}

Ival iv_sub(const Ival& a, const Ival& b) {
  return {dir_down(a.lo - b.hi), dir_up(a.hi - b.lo)};
}

Ival iv_mul(const Ival& a, const Ival& b) {
  return {dir_down(a.lo * b.lo), dir_up(a.hi * b.hi)};
}

Ival iv_div(const Ival& a, const Ival& b) {
  if (b.lo <= 0) fail(Errc::ZeroDenominator, "interval division by nonpositive");
  return {dir_down(a.lo / b.hi), dir_up(a.hi / b.lo)};
}

Ival iv_abs_sub(const Ival& a, const Ival& b) {
  Ival d = iv_sub(a, b);
  if (d.lo >= 0) return d;
  if (d.hi <= 0) return {-d.hi, -d.lo};
  return {0.0, std::max(-d.lo, d.hi)};
}

Ival iv_clamp01(const Ival& a) {
  Ival r = a;
  if (r.lo < 0) r.lo = 0;
  if (r.hi > 1) r.hi = 1;
  if (r.hi < r.lo) r.hi = r.lo;
  return r;
}

WilsonCI wilson(long successes, long n, double z) {
  WilsonCI ci;
  if (n <= 0) fail(Errc::InvalidConfig, "Wilson interval needs n > 0");
  double p = double(successes) / double(n);
  ci.mean = p;
  ci.stderr_ = proportion_sigma(p, n);
  double z2 = z * z, nn = double(n);
  double denom = 1.0 + z2 / nn;
  double center = (p + z2 / (2 * nn)) / denom;
  double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  ci.lo = std::max(0.0, center - half);
  ci.hi = std::min(1.0, center + half);
  return ci;
}

double proportion_sigma(double p, long n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(p * (1 - p), 1e-12) / double(n));
}

double pairwise_sum(const std::vector<double>& v) {
  // bottom-up pairwise reduction
  if (v.empty()) return 0.0;
  std::vector<double> acc(v);
  while (acc.size() > 1) {
    size_t half = (acc.size() + 1) / 2;
    for (size_t i = 0; i + i + 1 < acc.size(); ++i) acc[i] = acc[2 * i] + acc[2 * i + 1];
    if (acc.size() & 1) acc[half - 1] = acc.back();
    acc.resize(half);
  }
  return acc[0];
}

}  // namespace twistrec
