#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twistrec/errors.hpp"

#include "twistrec/measures.hpp"
#include "twistrec/systems.hpp"

using namespace twistrec;

namespace {

CertifiedPoint exact_fraction(long num, long den, int prec) {
  BigFloat v(prec);
  mpfr_set_si(v.raw(), num, MPFR_RNDN);
  mpfr_div_si(v.raw(), v.raw(), den, MPFR_RNDN);
  BigFloat rad = ulp_bound(v, prec, 1);
  return CertifiedPoint{std::move(v), std::move(rad), prec};
}

}  // namespace

TEST_CASE("doubling map: one exact step") {
  SystemSpec sys = SystemSpec::parse("beta:2");
  CertifiedPoint y = apply(sys, CertifiedPoint::exact(0.3, 128));
  CHECK(y.mid.to_double() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(y.rad.to_double() < 1e-30);
}

TEST_CASE("golden beta: big-float step at 128 bits") {
  SystemSpec sys = SystemSpec::parse("beta:golden");
  CertifiedPoint y = apply(sys, CertifiedPoint::exact(0.7, 128));
  // phi*0.7 - 1
  CHECK(y.mid.to_double() == doctest::Approx(0.13262379212492643).epsilon(1e-13));
}

TEST_CASE("gauss map: exact rational step") {
  SystemSpec sys = SystemSpec::parse("gauss");
  CertifiedPoint y = apply(sys, CertifiedPoint::exact(0.4, 128));
  CHECK(y.mid.to_double() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(branch_index(sys, CertifiedPoint::exact(0.4, 128)) == 2);
  CHECK(branch_index(sys, CertifiedPoint::exact(0.3, 128)) == 3);
}

TEST_CASE("branch indices") {
  CHECK(branch_index(SystemSpec::parse("beta:golden"), CertifiedPoint::exact(0.5, 128)) == 0);
  CHECK(branch_index(SystemSpec::parse("beta:2"), CertifiedPoint::exact(0.75, 128)) == 1);
}

TEST_CASE("branch straddle is an error, not a guess") {
  SystemSpec sys = SystemSpec::parse("beta:2");
  CertifiedPoint on_boundary{BigFloat(0.5, 64), rad_from(1e-6), 64};
  CHECK_THROWS_AS(branch_index(sys, on_boundary), Error);
}

TEST_CASE("doubling orbit of 1/3 is the 2-cycle") {
  SystemSpec sys = SystemSpec::parse("beta:2");
  OrbitResult orb = orbit(sys, exact_fraction(1, 3, 192), 3);
  REQUIRE(!orb.error);
  REQUIRE(orb.steps.size() == 3);
  CHECK(orb.steps[0].digit == 0);
  CHECK(orb.steps[1].digit == 1);
  CHECK(orb.steps[2].digit == 0);
  CHECK(orb.steps[0].point.mid.to_double() == doctest::Approx(2.0 / 3));
  CHECK(orb.steps[1].point.mid.to_double() == doctest::Approx(1.0 / 3));
  CHECK(orb.steps[2].point.mid.to_double() == doctest::Approx(2.0 / 3));
}

TEST_CASE("gauss golden point is fixed with digit 1") {
  SystemSpec sys = SystemSpec::parse("gauss");
  int prec = 256;
  BigFloat v = bf_sqrt_ui(5, prec);
  mpfr_sub_ui(v.raw(), v.raw(), 1, MPFR_RNDN);
  mpfr_div_2ui(v.raw(), v.raw(), 1, MPFR_RNDN);
  BigFloat rad = ulp_bound(v, prec, 4);
  CertifiedPoint x{std::move(v), std::move(rad), prec};
  OrbitResult orb = orbit(sys, x, 4);
  REQUIRE(!orb.error);
  for (const auto& st : orb.steps) {
    CHECK(st.digit == 1);
    CHECK(st.point.mid.to_double() == doctest::Approx(0.6180339887498949).epsilon(1e-10));
  }
}

TEST_CASE("rotation distance from start is x-free") {
  SystemSpec sys = SystemSpec::parse("rotation:golden");
  // d(T^n x, x) must agree for two different starting points
  for (double x0 : {0.1, 0.7}) {
    CertifiedPoint x = CertifiedPoint::exact(x0, 160);
    OrbitResult orb = orbit(sys, x, 5);
    REQUIRE(!orb.error);
    DistBracket d = circle_distance(orb.steps[0].point, x);
    // ||alpha|| = 1 - phi^-1 ... = 0.3819660112501051
    CHECK(d.lo.to_double() == doctest::Approx(0.3819660112501051).epsilon(1e-9));
  }
}

TEST_CASE("orbit radii grow within per-branch expansion bounds") {
  SUBCASE("beta: factor is exactly beta per step") {
    SystemSpec sys = SystemSpec::parse("beta:golden");
    CertifiedPoint x{BigFloat(0.7, 256), rad_from(1e-40), 256};
    OrbitResult orb = orbit(sys, x, 10);
    REQUIRE(!orb.error);
    double prev = 1e-40;
    for (const auto& st : orb.steps) {
      double r = st.point.rad.to_double();
      CHECK(r >= prev * 0.99);                // monotone nondecreasing
      CHECK(r <= prev * 1.6180339887498949 * 1.0001 + 1e-70);
      prev = r;
    }
  }
  SUBCASE("gauss: factor on branch i within [i^2, (i+1)^2]") {
    SystemSpec sys = SystemSpec::parse("gauss");
    CertifiedPoint x{BigFloat(0.37, 256), rad_from(1e-40), 256};
    CertifiedPoint cur = x;
    for (int k = 0; k < 6; ++k) {
      double before = cur.rad.to_double();
      long d = branch_index(sys, cur);
      cur = apply(sys, cur);
      double after = cur.rad.to_double();
      double lo_f = double(d) * double(d);
      double hi_f = double(d + 1) * double(d + 1);
      CHECK(after >= before * lo_f * 0.999);
      CHECK(after <= before * hi_f * 1.001 + 1e-70);
    }
  }
  SUBCASE("ifs: factor is exactly 1/r_i; rotation: exactly 1") {
    SystemSpec c3 = SystemSpec::parse("ifs:cantor3");
    Measure mu(c3);
    CertifiedPoint x = mu.sample(7, 0, 192);
    double before = x.rad.to_double();
    CertifiedPoint y = apply(c3, x);
    // factor 1/r = 3 plus a few rounding ulps at the working precision
    CHECK(y.rad.to_double() <= before * 3.0 * 1.0001 + std::ldexp(4.0, -190));
    SystemSpec rot = SystemSpec::parse("rotation:golden");
    CertifiedPoint z{BigFloat(0.3, 160), rad_from(1e-30), 160};
    CertifiedPoint w = apply(rot, z);
    CHECK(w.rad.to_double() <= 1e-30 * 1.001 + 1e-40);
  }
}

TEST_CASE("enclosure soundness: recomputing at twice the precision nests") {
  SystemSpec sys = SystemSpec::parse("beta:golden");
  Measure mu(sys);
  long N = 24;
  int p1 = required_precision(sys, N);
  for (uint64_t idx = 0; idx < 8; ++idx) {
    CertifiedPoint x1 = mu.sample(11, idx, p1);
    CertifiedPoint x2 = mu.sample(11, idx, 2 * p1);
    OrbitResult o1 = orbit(sys, x1, N);
    OrbitResult o2 = orbit(sys, x2, N);
    REQUIRE(!o1.error);
    REQUIRE(!o2.error);
    for (long k = 0; k < N; ++k) {
      CHECK(o1.steps[size_t(k)].digit == o2.steps[size_t(k)].digit);
      // finer enclosure overlaps the coarse one well within 2 rad
      double gap = std::fabs(o1.steps[size_t(k)].point.mid.to_double() -
                             o2.steps[size_t(k)].point.mid.to_double());
      CHECK(gap <= 2.0 * o1.steps[size_t(k)].point.rad.to_double() + 1e-30);
    }
  }
}

TEST_CASE("required precision policy") {
  SystemSpec g = SystemSpec::parse("beta:golden");
  CHECK(required_precision(g, 100) >= 100 * 0.69);
  CHECK(required_precision(g, 100) <= 100 * 0.70 + 66);
  CHECK(required_precision(SystemSpec::parse("gauss"), 1000) == 256);
}

TEST_CASE("measure preservation, statistically: push samples through T") {
  // histogram of T(samples) against the exact invariant bin masses
  for (const char* id : {"beta:golden", "gauss"}) {
    SystemSpec sys = SystemSpec::parse(id);
    Measure mu(sys);
    const long n = 100000;
    const int bins = 20;
    std::vector<long> direct(bins, 0), pushed(bins, 0);
    for (long i = 0; i < n; ++i) {
      CertifiedPoint x = mu.sample(31337, uint64_t(i), 96);
      double xv = x.mid.to_double();
      int b = std::min(bins - 1, std::max(0, int(xv * bins)));
      ++direct[size_t(b)];
      CertifiedPoint y = apply(sys, x);
      double yv = y.mid.to_double();
      int b2 = std::min(bins - 1, std::max(0, int(yv * bins)));
      ++pushed[size_t(b2)];
    }
    for (int b = 0; b < bins; ++b) {
      double p = mu.interval(double(b) / bins, double(b + 1) / bins).mid();
      double sigma = proportion_sigma(p, n);
      CHECK(std::fabs(double(direct[size_t(b)]) / n - p) <= 3.0 * sigma + 1e-4);
      CHECK(std::fabs(double(pushed[size_t(b)]) / n - p) <= 3.0 * sigma + 1e-4);
    }
  }
}

TEST_CASE("system parsing and ids") {
  CHECK(SystemSpec::parse("beta:2").id() == "beta:2");
  CHECK(SystemSpec::parse("beta:golden").id() == "beta:golden");
  CHECK(SystemSpec::parse("ifs:cantor3").id() == "ifs:cantor3");
  CHECK(SystemSpec::parse("rotation:golden").id() == "rotation:golden");
  CHECK(SystemSpec::parse("ifs:cantor3").delta ==
        doctest::Approx(0.6309297535714574).epsilon(1e-12));
  CHECK_THROWS_AS(SystemSpec::parse("weird:1"), Error);
  // overlapping cells violate the open set condition witness
  CHECK_THROWS_AS(SystemSpec::parse("ifs:0.6,0;0.6,0.4"), Error);
}

TEST_CASE("gauss digit cap triggers on huge digits") {
  SystemSpec sys = SystemSpec::parse("gauss");
  CertifiedPoint tiny = CertifiedPoint::exact(1e-300, 128);
  auto st = make_stepper(sys, 128);
  CertifiedPoint x = tiny;
  CHECK(st->step(x).status == StepStatus::DigitOverflow);
}

TEST_CASE("asymmetric IFS dimension solves the closed form") {
  // ratios 1/2 and 1/4: 2^-d + 4^-d = 1 has x = 2^-d = (sqrt(5)-1)/2,
  // so d = log2(phi)
  SystemSpec sys = SystemSpec::parse("ifs:0.5,0;0.25,0.75");
  double expect = std::log2(1.6180339887498949);
  CHECK(sys.delta == doctest::Approx(expect).epsilon(1e-12));
  CHECK(sys.hull_lo == 0);
  CHECK(sys.hull_hi == 1);
}

TEST_CASE("doubling orbits of dyadic points stay exact") {
  SystemSpec sys = SystemSpec::parse("beta:2");
  CertifiedPoint x = CertifiedPoint::exact(0.3125, 96);  // 5/16
  OrbitResult orb = orbit(sys, x, 4);
  REQUIRE(!orb.error);
  for (const auto& st : orb.steps) CHECK(st.point.rad.is_zero());
  CHECK(orb.steps[3].point.mid.to_double() == 0.0);  // 5/16 -> ... -> 0
}

TEST_CASE("rotation branch digits accumulate to the wrap count") {
  SystemSpec sys = SystemSpec::parse("rotation:golden");
  double alpha = sys.rotation_angle(96).mid.to_double();
  CertifiedPoint x = CertifiedPoint::exact(0.37, 160);
  OrbitResult orb = orbit(sys, x, 12);
  REQUIRE(!orb.error);
  long wraps = 0;
  for (long k = 1; k <= 12; ++k) {
    wraps += orb.steps[size_t(k - 1)].digit;
    CHECK(wraps == long(std::floor(0.37 + double(k) * alpha)));
  }
}
