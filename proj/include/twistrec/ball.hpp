#pragma once

#include "twistrec/bigfloat.hpp"

namespace twistrec {

// Error radii are kept at a small fixed precision and always rounded up,
// so every CertifiedPoint is a sound enclosure [mid - rad, mid + rad].
inline constexpr int kRadPrec = 32;

BigFloat rad_zero();
BigFloat rad_from(double v);
BigFloat rad_add(const BigFloat& a, const BigFloat& b);
BigFloat rad_mul(const BigFloat& a, const BigFloat& b);
BigFloat rad_mul(const BigFloat& a, double b);
// Upper bound for k ulps of `v` at precision `prec` (works for v == 0 too).
BigFloat ulp_bound(const BigFloat& v, int prec, int k = 1);

// A point of the phase space carried as midpoint plus rigorous error radius.
struct CertifiedPoint {
  BigFloat mid;
  BigFloat rad;
  int prec_bits = 64;

  static CertifiedPoint exact(BigFloat v) {
    int p = v.prec();
    return CertifiedPoint{std::move(v), rad_zero(), p};
  }
  static CertifiedPoint exact(double v, int prec) {
    return CertifiedPoint{BigFloat(v, prec), rad_zero(), prec};
  }

  BigFloat lo() const;  // rounded down
  BigFloat hi() const;  // rounded up

  // Certified three-way comparison against a bound: -1 if the whole
  // enclosure is below, +1 if at or above, 0 if it straddles.
  int cmp(const BigFloat& bound) const;
};

// Smallest ball at `prec` bits covering [lo, hi].
CertifiedPoint recenter(const BigFloat& lo, const BigFloat& hi, int prec);
void recenter_into(CertifiedPoint& x, const BigFloat& lo, const BigFloat& hi, int prec);

// Enclosure of |a - b| as a [lo, hi] bracket (lo clamped at 0).
struct DistBracket {
  BigFloat lo;
  BigFloat hi;
};
DistBracket distance(const CertifiedPoint& a, const CertifiedPoint& b);
// Distance on the circle R/Z; both points are expected to lie in [0, 1).
DistBracket circle_distance(const CertifiedPoint& a, const CertifiedPoint& b);

}  // namespace twistrec
