#include "twistrec/twists.hpp"

#include <cmath>
#include <limits>

#include "twistrec/errors.hpp"
#include "twistrec/rng.hpp"

namespace twistrec {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& s) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) fail(Errc::InvalidConfig, "malformed number: " + s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::InvalidConfig, "malformed number: " + s);
  }
}

// Directed enclosure of a*x + b, clipped to [clip_lo, clip_hi] when asked.
CertifiedPoint affine_ball(const CertifiedPoint& x, double a, double b,
                           bool clip) {
  int p = x.prec_bits;
  BigFloat xlo = x.lo(), xhi = x.hi();
  BigFloat ylo(p + 8), yhi(p + 8);
  if (a >= 0) {
    mpfr_mul_d(ylo.raw(), xlo.raw(), a, MPFR_RNDD);
    mpfr_mul_d(yhi.raw(), xhi.raw(), a, MPFR_RNDU);
  } else {
    mpfr_mul_d(ylo.raw(), xhi.raw(), a, MPFR_RNDD);
    mpfr_mul_d(yhi.raw(), xlo.raw(), a, MPFR_RNDU);
  }
  mpfr_add_d(ylo.raw(), ylo.raw(), b, MPFR_RNDD);
  mpfr_add_d(yhi.raw(), yhi.raw(), b, MPFR_RNDU);
  if (clip) {
    if (ylo.sign() < 0) mpfr_set_zero(ylo.raw(), 1);
    if (yhi.cmp(1.0) > 0) mpfr_set_d(yhi.raw(), 1.0, MPFR_RNDN);
    if (yhi.sign() < 0) mpfr_set_zero(yhi.raw(), 1);
    if (ylo.cmp(1.0) > 0) mpfr_set_d(ylo.raw(), 1.0, MPFR_RNDN);
  }
  return recenter(ylo, yhi, p);
}

}  // namespace

double TwistSpec::lipschitz_p() const {
  switch (family) {
    case Family::Identity: return 1.0;
    case Family::Constant: return 0.0;
    case Family::Affine: return std::fabs(affine_a);
    case Family::Sqrt: return std::numeric_limits<double>::infinity();
    case Family::Piecewise: {
      double p = 0.0;
      for (const auto& pc : pieces) p = std::max(p, pc.lipschitz);
      return p;
    }
  }
  return 1.0;
}

double TwistSpec::local_lipschitz(double x) const {
  if (family == Family::Sqrt) {
    if (x <= 0) return std::numeric_limits<double>::infinity();
    // piece [2^-k-1, 2^-k) containing x; sup |f'| = 1/(2 sqrt(2^-k-1))
    int k = int(std::floor(-std::log2(x)));
    double lo = std::ldexp(1.0, -k - 1);
    return std::nextafter(0.5 / std::sqrt(lo), 1e300);
  }
  if (family == Family::Piecewise) {
    for (const auto& pc : pieces)
      if (x >= pc.lo && x < pc.hi) return pc.lipschitz;
    return lipschitz_p();
  }
  return lipschitz_p();
}

TwistSpec TwistSpec::parse(const std::string& id) {
  auto colon = id.find(':');
  std::string head = colon == std::string::npos ? id : id.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  TwistSpec f;
  if (head == "identity" || head == "id") {
    f.family = Family::Identity;
    return f;
  }
  if (head == "const" || head == "constant") {
    f.family = Family::Constant;
    f.constant_y = parse_double(tail);
    if (f.constant_y < 0 || f.constant_y > 1)
      fail(Errc::InvalidConfig, "constant twist must map into [0,1]");
    return f;
  }
  if (head == "affine") {
    auto args = split(tail, ',');
    if (args.size() != 2 && args.size() != 3)
      fail(Errc::InvalidConfig, "affine twist needs 'a,b[,mod1]': " + id);
    f.family = Family::Affine;
    f.affine_a = parse_double(args[0]);
    f.affine_b = parse_double(args[1]);
    f.affine_mod1 = args.size() == 3;
    if (f.affine_mod1 && args[2] != "mod1")
      fail(Errc::InvalidConfig, "third affine argument must be 'mod1': " + id);
    if (f.affine_mod1 && f.affine_a != 0.0) {
      // Realize the wrap as explicit pieces over [0,1).
      double a = f.affine_a, b = f.affine_b;
      long k_first, k_last;
      if (a > 0) {
        k_first = long(std::floor(b));
        k_last = long(std::floor(a + b));
      } else {
        k_first = long(std::floor(a + b));
        k_last = long(std::floor(b));
      }
      for (long k = k_first; k <= k_last; ++k) {
        // x with floor(ax+b) = k, i.e. ax+b in [k, k+1)
        double u = (double(k) - b) / a, v = (double(k) + 1 - b) / a;
        double lo = std::max(0.0, std::min(u, v));
        double hi = std::min(1.0, std::max(u, v));
        if (lo < hi)
          f.pieces.push_back({lo, hi, a, b - double(k), std::fabs(a)});
      }
    }
    return f;
  }
  if (head == "sqrt") {
    f.family = Family::Sqrt;
    return f;
  }
  if (head == "piecewise") {
    f.family = Family::Piecewise;
    for (const auto& part : split(tail, ';')) {
      auto args = split(part, ',');
      if (args.size() != 4)
        fail(Errc::InvalidConfig, "piecewise piece needs 'lo,hi,a,b': " + part);
      Piece pc;
      pc.lo = parse_double(args[0]);
      pc.hi = parse_double(args[1]);
      pc.a = parse_double(args[2]);
      pc.b = parse_double(args[3]);
      pc.lipschitz = std::fabs(pc.a);
      if (!(pc.lo < pc.hi)) fail(Errc::InvalidConfig, "piece interval is empty: " + part);
      f.pieces.push_back(pc);
    }
    for (size_t i = 1; i < f.pieces.size(); ++i)
      if (f.pieces[i].lo < f.pieces[i - 1].hi)
        fail(Errc::InvalidConfig, "piecewise pieces overlap");
    double covered = 0.0;
    for (const auto& pc : f.pieces) covered += pc.hi - pc.lo;
    if (std::fabs(covered - 1.0) > 1e-12)
      fail(Errc::InvalidConfig,
           "piecewise pieces must cover [0,1] up to measure zero; covered " +
               std::to_string(covered));
    return f;
  }
  fail(Errc::InvalidConfig, "unknown twist: " + id);
}

std::string TwistSpec::id() const {
  char buf[160];
  switch (family) {
    case Family::Identity: return "identity";
    case Family::Constant:
      std::snprintf(buf, sizeof buf, "const:%.17g", constant_y);
      return buf;
    case Family::Affine:
      std::snprintf(buf, sizeof buf, "affine:%.17g,%.17g%s", affine_a, affine_b,
                    affine_mod1 ? ",mod1" : "");
      return buf;
    case Family::Sqrt: return "sqrt";
    case Family::Piecewise: {
      std::string out = "piecewise:";
      for (size_t i = 0; i < pieces.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g,%.17g,%.17g,%.17g", i ? ";" : "",
                      pieces[i].lo, pieces[i].hi, pieces[i].a, pieces[i].b);
        out += buf;
      }
      return out;
    }
  }
  return "?";
}

CertifiedPoint eval_twist(const TwistSpec& f, const CertifiedPoint& x) {
  switch (f.family) {
    case TwistSpec::Family::Identity:
      return x;
    case TwistSpec::Family::Constant:
      return CertifiedPoint::exact(f.constant_y, x.prec_bits);
    case TwistSpec::Family::Affine: {
      if (!f.affine_mod1) return affine_ball(x, f.affine_a, f.affine_b, true);
      if (f.affine_a == 0.0)
        return CertifiedPoint::exact(f.affine_b - std::floor(f.affine_b), x.prec_bits);
      // mod-1: require the enclosure within one wrap piece
      CertifiedPoint y = affine_ball(x, f.affine_a, f.affine_b, false);
      BigFloat ylo = y.lo(), yhi = y.hi();
      long f1 = mpfr_get_si(ylo.raw(), MPFR_RNDD);
      long f2 = mpfr_get_si(yhi.raw(), MPFR_RNDD);
      if (f1 != f2) fail(Errc::PieceStraddle, "affine mod-1 wrap inside the enclosure");
      mpfr_sub_si(ylo.raw(), ylo.raw(), f1, MPFR_RNDD);
      mpfr_sub_si(yhi.raw(), yhi.raw(), f1, MPFR_RNDU);
      return recenter(ylo, yhi, x.prec_bits);
    }
    case TwistSpec::Family::Sqrt: {
      BigFloat xlo = x.lo(), xhi = x.hi();
      if (xlo.sign() < 0) fail(Errc::PieceStraddle, "sqrt piece undefined at 0");
      if (xlo.sign() == 0 && xhi.sign() == 0)
        return CertifiedPoint::exact(0.0, x.prec_bits);
      if (xlo.sign() == 0 || (xhi.cmp(1.0) < 0 && xlo.exponent() != xhi.exponent()))
        fail(Errc::PieceStraddle, "enclosure spans two dyadic sqrt pieces");
      int p = x.prec_bits;
      BigFloat ylo = bf_sqrt(xlo, p + 8, MPFR_RNDD);
      BigFloat yhi = bf_sqrt(xhi, p + 8, MPFR_RNDU);
      return recenter(ylo, yhi, p);
    }
    case TwistSpec::Family::Piecewise: {
      BigFloat xlo = x.lo(), xhi = x.hi();
      for (const auto& pc : f.pieces) {
        if (xlo.cmp(pc.lo) >= 0 && xhi.cmp(pc.hi) < 0)
          return affine_ball(x, pc.a, pc.b, false);
      }
      fail(Errc::PieceStraddle, "enclosure not inside a single piece");
    }
  }
  fail(Errc::Internal, "unreachable");
}

Commutes commutes_with(const TwistSpec& f, const SystemSpec& sys, int trials,
                       uint64_t seed) {
  if (trials < 1) fail(Errc::InvalidConfig, "commutes_with needs trials >= 1");
  if (f.family == TwistSpec::Family::Identity) return Commutes::Yes;
  if (f.family == TwistSpec::Family::Affine && f.affine_mod1 &&
      f.affine_a == 1.0 && sys.kind == SystemKind::Rotation)
    return Commutes::Yes;  // translations commute
  if (f.family == TwistSpec::Family::Constant) {
    // T o f = f o T forces T(y) = y; check the fixed-point condition.
    CertifiedPoint y = CertifiedPoint::exact(f.constant_y, 128);
    try {
      CertifiedPoint ty = apply(sys, y);
      DistBracket d = distance(ty, y);
      if (d.lo.sign() > 0) return Commutes::No;
      if (d.hi.sign() == 0) return Commutes::Yes;
    } catch (const Error&) {
    }
    return Commutes::Inconclusive;
  }
  // Hunt for a certified witness |T(f(x)) - f(T(x))| > 0.
  for (int i = 0; i < trials; ++i) {
    BitTape tape(seed, /*stream=*/901, uint64_t(i));
    CertifiedPoint x = tape.uniform(192);
    try {
      CertifiedPoint a = apply(sys, eval_twist(f, x));
      CertifiedPoint b = eval_twist(f, apply(sys, x));
      DistBracket d = sys.kind == SystemKind::Rotation ? circle_distance(a, b)
                                                       : distance(a, b);
      if (d.lo.sign() > 0) return Commutes::No;
    } catch (const Error&) {
      continue;  // straddle: skip this probe point
    }
  }
  return Commutes::Inconclusive;
}

std::string to_string(Commutes c) {
  switch (c) {
    case Commutes::Yes: return "yes";
    case Commutes::No: return "no";
    case Commutes::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace twistrec
