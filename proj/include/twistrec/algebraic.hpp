#pragma once

#include <gmpxx.h>

#include <array>
#include <optional>
#include <string>

#include "twistrec/ball.hpp"

namespace twistrec {

// The expansion base of a beta-transformation, kept in a form that allows
// exact arithmetic in Q(beta): integers and rationals directly, the golden
// ratio via x^2 = x + 1 (and general quadratic Pisot x^2 = kx + l), the
// tribonacci constant via x^3 = x^2 + x + 1.
class BetaNumber {
public:
  enum class Kind { Integer, Rational, Quadratic, Tribonacci };

  static BetaNumber integer(long n);
  static BetaNumber rational(const mpq_class& q);
  // Parses "2", "golden", "tribonacci" or a decimal literal like "1.9".
  static BetaNumber parse(const std::string& spec);
  static BetaNumber golden() { return quadratic(1, 1); }
  static BetaNumber quadratic(long k, long l);
  static BetaNumber tribonacci();

  Kind kind() const { return kind_; }
  int degree() const;  // degree of Q(beta) over Q
  bool is_integer() const { return kind_ == Kind::Integer; }
  long integer_value() const { return int_value_; }
  long quad_k() const { return k_; }
  long quad_l() const { return l_; }
  const mpq_class& rational_value() const { return rat_; }

  // Enclosure of beta at >= prec bits (exact for integer/rational input).
  CertifiedPoint approx(int prec) const;
  double upper_double() const;  // a double known to be >= beta
  long floor() const;           // exact floor of beta
  long branch_count() const;    // ceil(beta)

  std::string describe() const;

private:
  Kind kind_ = Kind::Integer;
  long int_value_ = 2;
  mpq_class rat_;
  long k_ = 0, l_ = 0;
};

// Element of Q(beta), represented as c0 + c1*beta + c2*beta^2 with rational
// coefficients (c1 = c2 = 0 in the rational case). Zero tests are exact;
// sign tests evaluate with interval arithmetic at escalating precision,
// which terminates because nonzero elements are bounded away from zero.
class QBeta {
public:
  QBeta() = default;
  QBeta(const BetaNumber* base, mpq_class c0) : base_(base) { c_[0] = std::move(c0); }

  static QBeta zero(const BetaNumber* base) { return QBeta(base, 0); }
  static QBeta one(const BetaNumber* base) { return QBeta(base, 1); }
  static QBeta integer(const BetaNumber* base, long v) { return QBeta(base, mpq_class(v)); }
  static QBeta beta(const BetaNumber* base);      // the element beta itself
  static QBeta inv_beta(const BetaNumber* base);  // 1/beta

  const BetaNumber* base() const { return base_; }

  QBeta operator+(const QBeta& o) const;
  QBeta operator-(const QBeta& o) const;
  QBeta operator-() const;
  QBeta mul_beta() const;  // multiply by beta, reduced by the minimal polynomial
  QBeta mul_inv_beta() const;  // divide by beta
  QBeta mul_rat(const mpq_class& q) const;
  QBeta add_int(long v) const;

  bool is_zero() const { return c_[0] == 0 && c_[1] == 0 && c_[2] == 0; }
  bool is_rational() const { return c_[1] == 0 && c_[2] == 0; }
  const mpq_class& coeff(int i) const { return c_[i]; }

  int sign() const;
  int cmp(const QBeta& o) const { return (*this - o).sign(); }
  bool operator==(const QBeta& o) const { return (*this - o).is_zero(); }
  bool operator<(const QBeta& o) const { return cmp(o) < 0; }
  bool operator<=(const QBeta& o) const { return cmp(o) <= 0; }

  // Exact floor; the element must lie within |value| < 2^60 or so.
  long floor() const;

  // Directed enclosure at >= prec bits.
  CertifiedPoint approx(int prec) const;
  double to_double() const { return approx(64).mid.to_double(); }

private:
  const BetaNumber* base_ = nullptr;
  std::array<mpq_class, 3> c_ = {mpq_class(0), mpq_class(0), mpq_class(0)};
};

// Exact decimal-literal parsing ("1.9" -> 19/10); throws on malformed input.
mpq_class parse_decimal(const std::string& s);

}  // namespace twistrec
