#include "twistrec/algebraic.hpp"

#include <cmath>
#include <stdexcept>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

bool is_perfect_square(long v) {
  if (v < 0) return false;
  long r = static_cast<long>(std::sqrt(double(v)));
  for (long c = std::max(0L, r - 2); c <= r + 2; ++c)
    if (c * c == v) return true;
  return false;
}

}  // namespace

BetaNumber BetaNumber::integer(long n) {
  if (n < 2) fail(Errc::InvalidConfig, "beta must exceed 1");
  BetaNumber b;
  b.kind_ = Kind::Integer;
  b.int_value_ = n;
  return b;
}

BetaNumber BetaNumber::rational(const mpq_class& q) {
  if (q <= 1) fail(Errc::InvalidConfig, "beta must exceed 1");
  if (q.get_den() == 1 && q.get_num().fits_slong_p())
    return integer(q.get_num().get_si());
  BetaNumber b;
  b.kind_ = Kind::Rational;
  b.rat_ = q;
  return b;
}

BetaNumber BetaNumber::quadratic(long k, long l) {
  if (k < 1 || l < 1 || l > k)
    fail(Errc::InvalidConfig, "quadratic beta requires k >= l >= 1");
  if (is_perfect_square(k * k + 4 * l))
    fail(Errc::InvalidConfig, "quadratic beta is rational; use a rational spec");
  BetaNumber b;
  b.kind_ = Kind::Quadratic;
  b.k_ = k;
  b.l_ = l;
  return b;
}

BetaNumber BetaNumber::tribonacci() {
  BetaNumber b;
  b.kind_ = Kind::Tribonacci;
  return b;
}

BetaNumber BetaNumber::parse(const std::string& spec) {
  if (spec == "golden") return golden();
  if (spec == "tribonacci") return tribonacci();
  return rational(parse_decimal(spec));
}

int BetaNumber::degree() const {
  switch (kind_) {
    case Kind::Integer:
    case Kind::Rational: return 1;
    case Kind::Quadratic: return 2;
    case Kind::Tribonacci: return 3;
  }
  return 1;
}

CertifiedPoint BetaNumber::approx(int prec) const {
  switch (kind_) {
    case Kind::Integer: {
      BigFloat v(int_value_, prec);
      return CertifiedPoint::exact(std::move(v));
    }
    case Kind::Rational: {
      BigFloat v(prec);
      mpfr_set_q(v.raw(), rat_.get_mpq_t(), MPFR_RNDN);
      BigFloat rad = ulp_bound(v, prec, 1);
      return CertifiedPoint{std::move(v), std::move(rad), prec};
    }
    case Kind::Quadratic: {
      // beta = (k + sqrt(k^2 + 4l)) / 2
      BigFloat s = bf_sqrt_ui(static_cast<unsigned long>(k_ * k_ + 4 * l_), prec + 4);
      BigFloat v(prec);
      mpfr_add_si(v.raw(), s.raw(), k_, MPFR_RNDN);
      mpfr_div_2ui(v.raw(), v.raw(), 1, MPFR_RNDN);
      BigFloat rad = ulp_bound(v, prec, 4);
      return CertifiedPoint{std::move(v), std::move(rad), prec};
    }
    case Kind::Tribonacci: {
      // Newton on p(x) = x^3 - x^2 - x - 1 from a double seed, then verify the
      // enclosure by sign checks at the endpoints.
      int wp = prec + 16;
      BigFloat x(1.839286755214161, wp);
      BigFloat t(wp), num(wp), den(wp);
      int iters = 4;
      for (int b = 64; b < wp; b *= 2) ++iters;
      for (int i = 0; i < iters; ++i) {
        // num = x^3 - x^2 - x - 1 ; den = 3x^2 - 2x - 1
        mpfr_mul(t.raw(), x.raw(), x.raw(), MPFR_RNDN);
        mpfr_mul(num.raw(), t.raw(), x.raw(), MPFR_RNDN);
        mpfr_sub(num.raw(), num.raw(), t.raw(), MPFR_RNDN);
        mpfr_sub(num.raw(), num.raw(), x.raw(), MPFR_RNDN);
        mpfr_sub_ui(num.raw(), num.raw(), 1, MPFR_RNDN);
        mpfr_mul_ui(den.raw(), t.raw(), 3, MPFR_RNDN);
        mpfr_sub(den.raw(), den.raw(), x.raw(), MPFR_RNDN);
        mpfr_sub(den.raw(), den.raw(), x.raw(), MPFR_RNDN);
        mpfr_sub_ui(den.raw(), den.raw(), 1, MPFR_RNDN);
        mpfr_div(num.raw(), num.raw(), den.raw(), MPFR_RNDN);
        mpfr_sub(x.raw(), x.raw(), num.raw(), MPFR_RNDN);
      }
      BigFloat rad = ulp_bound(x, wp, 16);
      CertifiedPoint p{std::move(x), rad, wp};
      // p is increasing at the root; verify sign change across the enclosure.
      auto poly = [&](const BigFloat& v) {
        BigFloat u = bf_mul(v, v, wp);
        BigFloat r = bf_mul(u, v, wp);
        r = bf_sub(r, u, wp);
        r = bf_sub(r, v, wp);
        mpfr_sub_ui(r.raw(), r.raw(), 1, MPFR_RNDN);
        return r;
      };
      while (!(poly(p.lo()).sign() < 0 && poly(p.hi()).sign() > 0)) {
        BigFloat wider = rad_mul(p.rad, 16.0);
        p.rad = wider;
        if (p.rad.cmp(1e-3) > 0)
          fail(Errc::Internal, "tribonacci root refinement failed");
      }
      return p;
    }
  }
  fail(Errc::Internal, "unreachable");
}

double BetaNumber::upper_double() const {
  switch (kind_) {
    case Kind::Integer: return double(int_value_);
    case Kind::Rational: return std::nextafter(rat_.get_d(), 1e300);
    case Kind::Quadratic: {
      double s = std::sqrt(double(k_ * k_ + 4 * l_));
      return std::nextafter((k_ + s) / 2 * (1 + 1e-14), 1e300);
    }
    case Kind::Tribonacci: return 1.8392867552141613;
  }
  return 2.0;
}

long BetaNumber::floor() const {
  switch (kind_) {
    case Kind::Integer: return int_value_;
    case Kind::Rational: {
      mpz_class f = rat_.get_num() / rat_.get_den();
      if (mpq_class(f) == rat_) return f.get_si();  // exact integer handled above
      return f.get_si();
    }
    case Kind::Quadratic: return k_;  // k < beta < k+1 for 1 <= l <= k
    case Kind::Tribonacci: return 1;
  }
  return 1;
}

long BetaNumber::branch_count() const {
  // ceil(beta); the last branch cell is (floor(beta)/beta, 1).
  if (kind_ == Kind::Integer) return int_value_;
  return floor() + 1;
}

std::string BetaNumber::describe() const {
  switch (kind_) {
    case Kind::Integer: return "beta:" + std::to_string(int_value_);
    case Kind::Rational: return "beta:" + rat_.get_str();
    case Kind::Quadratic:
      if (k_ == 1 && l_ == 1) return "beta:golden";
      return "beta:quadratic(" + std::to_string(k_) + "," + std::to_string(l_) + ")";
    case Kind::Tribonacci: return "beta:tribonacci";
  }
  return "beta:?";
}

// ---------------------------------------------------------------------------

QBeta QBeta::beta(const BetaNumber* base) {
  QBeta r = zero(base);
  switch (base->kind()) {
    case BetaNumber::Kind::Integer: r.c_[0] = base->integer_value(); break;
    case BetaNumber::Kind::Rational: r.c_[0] = base->rational_value(); break;
    default: r.c_[1] = 1; break;
  }
  return r;
}

QBeta QBeta::inv_beta(const BetaNumber* base) {
  QBeta r = zero(base);
  switch (base->kind()) {
    case BetaNumber::Kind::Integer:
      r.c_[0] = mpq_class(1, base->integer_value());
      break;
    case BetaNumber::Kind::Rational:
      r.c_[0] = 1 / base->rational_value();
      break;
    case BetaNumber::Kind::Quadratic:
      // beta^2 = k beta + l  =>  1/beta = (beta - k) / l
      r.c_[0] = mpq_class(-base->quad_k(), base->quad_l());
      r.c_[1] = mpq_class(1, base->quad_l());
      break;
    case BetaNumber::Kind::Tribonacci:
      // beta^3 = beta^2 + beta + 1  =>  1/beta = beta^2 - beta - 1
      r.c_[0] = -1;
      r.c_[1] = -1;
      r.c_[2] = 1;
      break;
  }
  return r;
}

QBeta QBeta::operator+(const QBeta& o) const {
  QBeta r = *this;
  for (int i = 0; i < 3; ++i) r.c_[i] += o.c_[i];
  return r;
}

QBeta QBeta::operator-(const QBeta& o) const {
  QBeta r = *this;
  for (int i = 0; i < 3; ++i) r.c_[i] -= o.c_[i];
  return r;
}

QBeta QBeta::operator-() const {
  QBeta r = *this;
  for (int i = 0; i < 3; ++i) r.c_[i] = -r.c_[i];
  return r;
}

QBeta QBeta::mul_beta() const {
  QBeta r = zero(base_);
  switch (base_->kind()) {
    case BetaNumber::Kind::Integer:
      r.c_[0] = c_[0] * base_->integer_value();
      break;
    case BetaNumber::Kind::Rational:
      r.c_[0] = c_[0] * base_->rational_value();
      break;
    case BetaNumber::Kind::Quadratic:
      // (c0 + c1 b) b = c1 l + (c0 + c1 k) b
      r.c_[0] = c_[1] * base_->quad_l();
      r.c_[1] = c_[0] + c_[1] * base_->quad_k();
      break;
    case BetaNumber::Kind::Tribonacci:
      // (c0 + c1 b + c2 b^2) b = c2 + (c0 + c2) b + (c1 + c2) b^2
      r.c_[0] = c_[2];
      r.c_[1] = c_[0] + c_[2];
      r.c_[2] = c_[1] + c_[2];
      break;
  }
  return r;
}

QBeta QBeta::mul_inv_beta() const {
  switch (base_->kind()) {
    case BetaNumber::Kind::Integer:
      return mul_rat(mpq_class(1, base_->integer_value()));
    case BetaNumber::Kind::Rational:
      return mul_rat(1 / base_->rational_value());
    case BetaNumber::Kind::Quadratic: {
      // x/beta = (x*beta - k*x) / l
      QBeta num = mul_beta() - mul_rat(mpq_class(base_->quad_k()));
      return num.mul_rat(mpq_class(1, base_->quad_l()));
    }
    case BetaNumber::Kind::Tribonacci: {
      // 1/beta = beta^2 - beta - 1
      QBeta xb = mul_beta();
      return xb.mul_beta() - xb - *this;
    }
  }
  fail(Errc::Internal, "unreachable");
}

QBeta QBeta::mul_rat(const mpq_class& q) const {
  QBeta r = *this;
  for (int i = 0; i < 3; ++i) r.c_[i] *= q;
  return r;
}

QBeta QBeta::add_int(long v) const {
  QBeta r = *this;
  r.c_[0] += v;
  return r;
}

CertifiedPoint QBeta::approx(int prec) const {
  if (is_rational()) {
    BigFloat v(prec);
    mpfr_set_q(v.raw(), c_[0].get_mpq_t(), MPFR_RNDN);
    BigFloat rad = ulp_bound(v, prec, 1);
    return CertifiedPoint{std::move(v), std::move(rad), prec};
  }
  CertifiedPoint b = base_->approx(prec + 8);
  int wp = prec + 8;
  // Interval evaluation c0 + c1 b + c2 b^2 with directed endpoints.
  auto eval = [&](const BigFloat& bv, mpfr_rnd_t rnd) {
    BigFloat acc(wp), t(wp);
    mpfr_set_q(acc.raw(), c_[2].get_mpq_t(), rnd);
    mpfr_mul(acc.raw(), acc.raw(), bv.raw(), rnd);
    mpfr_set_q(t.raw(), c_[1].get_mpq_t(), rnd);
    mpfr_add(acc.raw(), acc.raw(), t.raw(), rnd);
    mpfr_mul(acc.raw(), acc.raw(), bv.raw(), rnd);
    mpfr_set_q(t.raw(), c_[0].get_mpq_t(), rnd);
    mpfr_add(acc.raw(), acc.raw(), t.raw(), rnd);
    return acc;
  };
  // Horner with directed rounding is monotone only if intermediate signs are
  // fixed; evaluate at all four endpoint pairs and take the hull instead.
  BigFloat blo = b.lo(), bhi = b.hi();
  BigFloat vals[4] = {eval(blo, MPFR_RNDD), eval(bhi, MPFR_RNDD),
                      eval(blo, MPFR_RNDU), eval(bhi, MPFR_RNDU)};
  BigFloat lo = vals[0], hi = vals[0];
  for (int i = 1; i < 4; ++i) {
    if (vals[i] < lo) lo = vals[i];
    if (vals[i] > hi) hi = vals[i];
  }
  // Pad by the spread a nonmonotone quadratic can contribute inside the beta
  // enclosure: |d/db (c1 b + c2 b^2)| <= (|c1| + 2 |c2| bhi) * width.
  BigFloat width = bf_sub(bhi, blo, kRadPrec, MPFR_RNDU);
  long bcap = long(std::ceil(base_->upper_double())) + 1;
  BigFloat slope(kRadPrec);
  mpfr_set_q(slope.raw(), mpq_class(abs(c_[1]) + 2 * abs(c_[2]) * bcap).get_mpq_t(),
             MPFR_RNDU);
  BigFloat pad = rad_mul(width, slope);
  BigFloat mid = bf_div(bf_add(lo, hi, wp), BigFloat(2.0, 8), wp);
  BigFloat rad = rad_add(rad_mul(bf_sub(hi, lo, kRadPrec, MPFR_RNDU), 0.5), pad);
  rad = rad_add(rad, ulp_bound(mid, wp, 8));
  return CertifiedPoint{std::move(mid), std::move(rad), wp};
}

int QBeta::sign() const {
  if (is_zero()) return 0;
  if (is_rational()) return sgn(c_[0]);
  for (int prec = 64; prec <= (1 << 20); prec *= 2) {
    CertifiedPoint p = approx(prec);
    if (p.lo().sign() > 0) return 1;
    if (p.hi().sign() < 0) return -1;
  }
  fail(Errc::PrecisionExhausted, "sign of Q(beta) element did not resolve");
}

long QBeta::floor() const {
  if (is_rational()) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), c_[0].get_num().get_mpz_t(), c_[0].get_den().get_mpz_t());
    return f.get_si();
  }
  double d = to_double();
  long cand = static_cast<long>(std::floor(d));
  // Verify cand <= x < cand+1 exactly; drift by one if the double was off.
  for (int tries = 0; tries < 4; ++tries) {
    QBeta lo = add_int(-cand);
    if (lo.sign() < 0) { --cand; continue; }
    QBeta hi = add_int(-(cand + 1));
    if (hi.sign() >= 0) { ++cand; continue; }
    return cand;
  }
  fail(Errc::Internal, "floor of Q(beta) element did not settle");
}

mpq_class parse_decimal(const std::string& s) {
  if (s.empty()) fail(Errc::InvalidConfig, "empty numeric literal");
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) fail(Errc::InvalidConfig, "malformed decimal: " + s);
      seen_dot = true;
    } else if (c == '/') {
      // Allow exact fractions like "19/10".
      mpq_class q(s);
      q.canonicalize();
      return q;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    } else {
      fail(Errc::InvalidConfig, "malformed decimal: " + s);
    }
  }
  if (digits.empty()) fail(Errc::InvalidConfig, "malformed decimal: " + s);
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_digits));
  mpq_class q(num, den);
  q.canonicalize();
  if (neg) q = -q;
  return q;
}

}  // namespace twistrec
