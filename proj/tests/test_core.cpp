#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twistrec/errors.hpp"

#include "twistrec/algebraic.hpp"
#include "twistrec/ball.hpp"
#include "twistrec/rng.hpp"

using namespace twistrec;

TEST_CASE("philox4x32-10 known-answer vectors") {
  auto r0 = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(r0[0] == 0x6627e8d5u);
  CHECK(r0[1] == 0xe169c58du);
  CHECK(r0[2] == 0xbc57ac4cu);
  CHECK(r0[3] == 0x9b00dbd8u);
  auto rf = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                       {0xffffffffu, 0xffffffffu});
  CHECK(rf[0] == 0x408f276du);
  CHECK(rf[1] == 0x41c83b0eu);
  CHECK(rf[2] == 0xa20bc7c6u);
  CHECK(rf[3] == 0x6d5451fdu);
  auto rp = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u});
  CHECK(rp[0] == 0xd16cfe09u);
  CHECK(rp[1] == 0x94fdccebu);
  CHECK(rp[2] == 0x5001e420u);
  CHECK(rp[3] == 0x24126ea1u);
}

TEST_CASE("bit tape refinement extends the same point") {
  BitTape tape(123, 0, 42);
  CertifiedPoint a = tape.uniform(128);
  CertifiedPoint b = tape.uniform(256);
  // the coarser enclosure contains the finer one
  CHECK(b.lo() >= a.lo());
  CHECK(b.hi() <= a.hi());
  CHECK(b.rad < a.rad);
}

TEST_CASE("bit tape words are word-addressable and stable") {
  BitTape tape(9, 3, 7);
  uint64_t w5 = tape.word(5);
  for (int i = 0; i < 3; ++i) CHECK(tape.word(5) == w5);
  CHECK(tape.word(6) != w5);  // astronomically unlikely to collide
}

TEST_CASE("certified point endpoints bracket the midpoint") {
  CertifiedPoint p{BigFloat(0.7, 128), rad_from(1e-20), 128};
  CHECK(p.lo() < p.mid);
  CHECK(p.hi() > p.mid);
  CHECK(p.cmp(BigFloat(0.8, 64)) < 0);
  CHECK(p.cmp(BigFloat(0.6, 64)) > 0);
  CHECK(p.cmp(BigFloat(0.7, 64)) == 0);  // straddles
}

TEST_CASE("distance brackets are sound") {
  CertifiedPoint a{BigFloat(0.25, 96), rad_from(1e-12), 96};
  CertifiedPoint b{BigFloat(0.75, 96), rad_from(1e-12), 96};
  DistBracket d = distance(a, b);
  CHECK(d.lo.to_double() <= 0.5);
  CHECK(d.hi.to_double() >= 0.5);
  CHECK(d.hi.to_double() - d.lo.to_double() < 1e-10);
  DistBracket c = circle_distance(a, b);
  CHECK(c.lo.to_double() <= 0.5);
  CHECK(c.hi.to_double() >= 0.5);
  // circle distance of 0.1 vs 0.9 is 0.2
  CertifiedPoint u = CertifiedPoint::exact(0.1, 96);
  CertifiedPoint v = CertifiedPoint::exact(0.9, 96);
  DistBracket w = circle_distance(u, v);
  CHECK(w.lo.to_double() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("golden beta enclosure is certified") {
  BetaNumber g = BetaNumber::golden();
  CertifiedPoint b = g.approx(256);
  // phi^2 = phi + 1 within the enclosure
  double lo = b.lo().to_double(), hi = b.hi().to_double();
  CHECK(lo <= 1.6180339887498949);
  CHECK(hi >= 1.6180339887498949);
  CHECK(hi - lo < 1e-60);
}

TEST_CASE("tribonacci enclosure brackets the cubic root") {
  BetaNumber t = BetaNumber::tribonacci();
  CertifiedPoint b = t.approx(320);
  double v = b.mid.to_double();
  CHECK(v == doctest::Approx(1.839286755214161).epsilon(1e-14));
  CHECK(b.rad.to_double() < 1e-80);
}

TEST_CASE("QBeta arithmetic reduces by the minimal polynomial") {
  BetaNumber g = BetaNumber::golden();
  QBeta beta = QBeta::beta(&g);
  // beta^2 - beta - 1 = 0
  QBeta sq = beta.mul_beta();
  QBeta expr = sq - beta - QBeta::one(&g);
  CHECK(expr.is_zero());
  // 1/beta * beta = 1
  QBeta inv = QBeta::inv_beta(&g);
  QBeta prod = inv.mul_beta();
  CHECK(prod == QBeta::one(&g));
  // beta > 1.6 exactly
  CHECK(beta.cmp(QBeta(&g, mpq_class(8, 5))) > 0);
  CHECK(beta.floor() == 1);
}

TEST_CASE("QBeta tribonacci inverse") {
  BetaNumber t = BetaNumber::tribonacci();
  QBeta inv = QBeta::inv_beta(&t);
  CHECK(inv.mul_beta() == QBeta::one(&t));
  QBeta x = QBeta(&t, mpq_class(7, 5));
  CHECK(x.mul_inv_beta().mul_beta() == x);
}

TEST_CASE("decimal parsing is exact") {
  CHECK(parse_decimal("1.9") == mpq_class(19, 10));
  CHECK(parse_decimal("0.3333") == mpq_class(3333, 10000));
  CHECK(parse_decimal("19/10") == mpq_class(19, 10));
  CHECK(parse_decimal("2") == mpq_class(2));
  CHECK_THROWS_AS(parse_decimal("1.9.1"), Error);
  CHECK_THROWS_AS(parse_decimal("abc"), Error);
}

TEST_CASE("beta number parsing") {
  CHECK(BetaNumber::parse("2").is_integer());
  CHECK(BetaNumber::parse("golden").kind() == BetaNumber::Kind::Quadratic);
  CHECK(BetaNumber::parse("tribonacci").kind() == BetaNumber::Kind::Tribonacci);
  CHECK(BetaNumber::parse("1.9").kind() == BetaNumber::Kind::Rational);
  CHECK(BetaNumber::parse("1.9").branch_count() == 2);
  CHECK(BetaNumber::parse("golden").branch_count() == 2);
  CHECK(BetaNumber::parse("3").branch_count() == 3);
  CHECK_THROWS_AS(BetaNumber::parse("1"), Error);
  CHECK_THROWS_AS(BetaNumber::parse("0.5"), Error);
}
