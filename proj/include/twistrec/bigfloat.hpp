#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

namespace twistrec {

// Value-semantics wrapper around mpfr_t. Copies (construction and
// assignment) preserve the source precision exactly; rounding only ever
// happens in explicitly rounded operations.
class BigFloat {
public:
  explicit BigFloat(int prec = 64) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  BigFloat(double v, int prec) { mpfr_init2(x_, prec); mpfr_set_d(x_, v, MPFR_RNDN); }
  BigFloat(long v, int prec) { mpfr_init2(x_, prec); mpfr_set_si(x_, v, MPFR_RNDN); }
  BigFloat(const BigFloat& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, 2);
    mpfr_swap(x_, o.x_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(x_, mpfr_get_prec(o.x_));
      mpfr_set(x_, o.x_, MPFR_RNDN);  // exact: same precision
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  static BigFloat parse(const std::string& s, int prec, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(prec);
    mpfr_set_str(r.x_, s.c_str(), 10, rnd);
    return r;
  }
  // 2^e at minimal precision.
  static BigFloat pow2(long e) {
    BigFloat r(8);
    mpfr_set_ui_2exp(r.x_, 1, e, MPFR_RNDN);
    return r;
  }

  int prec() const { return static_cast<int>(mpfr_get_prec(x_)); }
  bool is_zero() const { return mpfr_zero_p(x_) != 0; }
  int sign() const { return mpfr_sgn(x_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(x_, rnd); }
  long exponent() const { return mpfr_get_exp(x_); }  // valid for nonzero values

  int cmp(const BigFloat& o) const { return mpfr_cmp(x_, o.x_); }
  int cmp(double v) const { return mpfr_cmp_d(x_, v); }
  int cmp_si(long v) const { return mpfr_cmp_si(x_, v); }
  bool operator<(const BigFloat& o) const { return cmp(o) < 0; }
  bool operator<=(const BigFloat& o) const { return cmp(o) <= 0; }
  bool operator>(const BigFloat& o) const { return cmp(o) > 0; }
  bool operator>=(const BigFloat& o) const { return cmp(o) >= 0; }
  bool operator==(const BigFloat& o) const { return cmp(o) == 0; }

  mpfr_ptr raw() { return x_; }
  mpfr_srcptr raw() const { return x_; }

  std::string str(int digits = 20) const;

private:
  mpfr_t x_;
};

// Out-of-place helpers; result carries `prec` bits and is rounded with `rnd`.
BigFloat bf_add(const BigFloat& a, const BigFloat& b, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_sub(const BigFloat& a, const BigFloat& b, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_mul(const BigFloat& a, const BigFloat& b, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_div(const BigFloat& a, const BigFloat& b, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_neg(const BigFloat& a);
BigFloat bf_abs(const BigFloat& a);
BigFloat bf_min(const BigFloat& a, const BigFloat& b);
BigFloat bf_max(const BigFloat& a, const BigFloat& b);
BigFloat bf_floor(const BigFloat& a);
// Named constants as (value, one-ulp error bound) at `prec` bits.
BigFloat bf_sqrt_ui(unsigned long v, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_log(const BigFloat& a, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_log2(const BigFloat& a, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_exp2(const BigFloat& a, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_pow(const BigFloat& a, const BigFloat& b, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_pow_si(const BigFloat& a, long e, int prec, mpfr_rnd_t rnd = MPFR_RNDN);
BigFloat bf_sqrt(const BigFloat& a, int prec, mpfr_rnd_t rnd = MPFR_RNDN);

}  // namespace twistrec
