#include "twistrec/bigfloat.hpp"

#include <cstdio>
#include <vector>

namespace twistrec {

std::string BigFloat::str(int digits) const {
  char fmt[32];
  std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
  char* out = nullptr;
  mpfr_asprintf(&out, fmt, x_);
  std::string s(out);
  mpfr_free_str(out);
  return s;
}

#define TWISTREC_BF_BINOP(name, op)                                          \
  BigFloat name(const BigFloat& a, const BigFloat& b, int prec,             \
                mpfr_rnd_t rnd) {                                           \
    BigFloat r(prec);                                                       \
    op(r.raw(), a.raw(), b.raw(), rnd);                                     \
    return r;                                                               \
  }

TWISTREC_BF_BINOP(bf_add, mpfr_add)
TWISTREC_BF_BINOP(bf_sub, mpfr_sub)
TWISTREC_BF_BINOP(bf_mul, mpfr_mul)
TWISTREC_BF_BINOP(bf_div, mpfr_div)
TWISTREC_BF_BINOP(bf_pow, mpfr_pow)

#undef TWISTREC_BF_BINOP

BigFloat bf_neg(const BigFloat& a) {
  BigFloat r(a.prec());
  mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat bf_abs(const BigFloat& a) {
  BigFloat r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat bf_min(const BigFloat& a, const BigFloat& b) { return a.cmp(b) <= 0 ? a : b; }
BigFloat bf_max(const BigFloat& a, const BigFloat& b) { return a.cmp(b) >= 0 ? a : b; }

BigFloat bf_floor(const BigFloat& a) {
  BigFloat r(a.prec());
  mpfr_floor(r.raw(), a.raw());
  return r;
}

BigFloat bf_sqrt_ui(unsigned long v, int prec, mpfr_rnd_t rnd) {
  BigFloat r(prec);
  mpfr_sqrt_ui(r.raw(), v, rnd);
  return r;
}

#define TWISTREC_BF_UNOP(name, op)                                          \
  BigFloat name(const BigFloat& a, int prec, mpfr_rnd_t rnd) {              \
    BigFloat r(prec);                                                       \
    op(r.raw(), a.raw(), rnd);                                              \
    return r;                                                               \
  }

TWISTREC_BF_UNOP(bf_log, mpfr_log)
TWISTREC_BF_UNOP(bf_log2, mpfr_log2)
TWISTREC_BF_UNOP(bf_exp2, mpfr_exp2)
TWISTREC_BF_UNOP(bf_sqrt, mpfr_sqrt)

#undef TWISTREC_BF_UNOP

BigFloat bf_pow_si(const BigFloat& a, long e, int prec, mpfr_rnd_t rnd) {
  BigFloat r(prec);
  mpfr_pow_si(r.raw(), a.raw(), e, rnd);
  return r;
}

}  // namespace twistrec
