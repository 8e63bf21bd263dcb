#include "twistrec/ball.hpp"

namespace twistrec {

BigFloat rad_zero() { return BigFloat(0.0, kRadPrec); }

BigFloat rad_from(double v) {
  BigFloat r(kRadPrec);
  mpfr_set_d(r.raw(), v, MPFR_RNDU);
  return r;
}

BigFloat rad_add(const BigFloat& a, const BigFloat& b) {
  BigFloat r(kRadPrec);
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
  return r;
}

BigFloat rad_mul(const BigFloat& a, const BigFloat& b) {
  BigFloat r(kRadPrec);
  mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
  return r;
}

BigFloat rad_mul(const BigFloat& a, double b) {
  BigFloat r(kRadPrec);
  mpfr_mul_d(r.raw(), a.raw(), b, MPFR_RNDU);
  return r;
}

BigFloat ulp_bound(const BigFloat& v, int prec, int k) {
  // All phase-space quantities are O(1), so exponent 2 is a safe fallback
  // for exact zeros.
  long e = v.is_zero() ? 2 : v.exponent();
  BigFloat r(kRadPrec);
  mpfr_set_si_2exp(r.raw(), k, e - prec, MPFR_RNDU);
  return r;
}

BigFloat CertifiedPoint::lo() const {
  BigFloat r(prec_bits + kRadPrec);
  mpfr_sub(r.raw(), mid.raw(), rad.raw(), MPFR_RNDD);
  return r;
}

BigFloat CertifiedPoint::hi() const {
  BigFloat r(prec_bits + kRadPrec);
  mpfr_add(r.raw(), mid.raw(), rad.raw(), MPFR_RNDU);
  return r;
}

int CertifiedPoint::cmp(const BigFloat& bound) const {
  if (hi() < bound) return -1;
  if (lo() >= bound) return +1;
  return 0;
}

void recenter_into(CertifiedPoint& x, const BigFloat& lo, const BigFloat& hi, int prec) {
  BigFloat mid(prec);
  int inexact = mpfr_add(mid.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
  mpfr_div_2ui(mid.raw(), mid.raw(), 1, MPFR_RNDN);  // exact (scaling)
  BigFloat rad = rad_mul(bf_sub(hi, lo, kRadPrec, MPFR_RNDU), 0.5);
  if (inexact != 0) rad = rad_add(rad, ulp_bound(mid, prec, 2));
  x.mid = std::move(mid);
  x.rad = std::move(rad);
  x.prec_bits = prec;
}

CertifiedPoint recenter(const BigFloat& lo, const BigFloat& hi, int prec) {
  CertifiedPoint x{BigFloat(prec), rad_zero(), prec};
  recenter_into(x, lo, hi, prec);
  return x;
}

DistBracket distance(const CertifiedPoint& a, const CertifiedPoint& b) {
  int p = std::max(a.prec_bits, b.prec_bits) + kRadPrec;
  BigFloat d(p);
  int inexact = mpfr_sub(d.raw(), a.mid.raw(), b.mid.raw(), MPFR_RNDN);
  mpfr_abs(d.raw(), d.raw(), MPFR_RNDN);
  BigFloat slack = rad_add(a.rad, b.rad);
  if (inexact != 0) slack = rad_add(slack, ulp_bound(d, p, 2));
  BigFloat lo(p), hi(p);
  mpfr_sub(lo.raw(), d.raw(), slack.raw(), MPFR_RNDD);
  if (lo.sign() < 0) mpfr_set_zero(lo.raw(), 1);
  mpfr_add(hi.raw(), d.raw(), slack.raw(), MPFR_RNDU);
  return {std::move(lo), std::move(hi)};
}

DistBracket circle_distance(const CertifiedPoint& a, const CertifiedPoint& b) {
  DistBracket d = distance(a, b);
  int p = std::max(a.prec_bits, b.prec_bits) + kRadPrec;
  // dist = min(|a-b|, 1-|a-b|)
  BigFloat one(1.0, p);
  BigFloat wlo(p), whi(p);
  mpfr_sub(wlo.raw(), one.raw(), d.hi.raw(), MPFR_RNDD);
  if (wlo.sign() < 0) mpfr_set_zero(wlo.raw(), 1);
  mpfr_sub(whi.raw(), one.raw(), d.lo.raw(), MPFR_RNDU);
  return {bf_min(d.lo, wlo), bf_min(d.hi, whi)};
}

}  // namespace twistrec
