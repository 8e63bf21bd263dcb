#include "twistrec/oracle.hpp"

#include <cmath>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

// Linear pieces of the twist on [0,1): f(x) = a x + b on [lo, hi).
struct LinPiece {
  double lo, hi, a, b;
};

std::vector<LinPiece> twist_pieces(const TwistSpec& f) {
  switch (f.family) {
    case TwistSpec::Family::Identity:
      return {{0.0, 1.0, 1.0, 0.0}};
    case TwistSpec::Family::Constant:
      return {{0.0, 1.0, 0.0, f.constant_y}};
    case TwistSpec::Family::Affine: {
      if (!f.affine_mod1) {
        // clipped: pieces where a x + b is below 0, inside, above 1
        std::vector<LinPiece> out;
        if (f.affine_a == 0.0)
          return {{0.0, 1.0, 0.0, std::min(1.0, std::max(0.0, f.affine_b))}};
        double x0 = (0.0 - f.affine_b) / f.affine_a;
        double x1 = (1.0 - f.affine_b) / f.affine_a;
        double lo = std::min(x0, x1), hi = std::max(x0, x1);
        double below = f.affine_a > 0 ? 0.0 : 1.0;
        if (lo > 0)
          out.push_back({0.0, std::min(lo, 1.0), 0.0, below});
        if (hi > lo)
          out.push_back({std::max(0.0, lo), std::min(1.0, hi), f.affine_a, f.affine_b});
        if (hi < 1)
          out.push_back({std::max(hi, 0.0), 1.0, 0.0, 1.0 - below});
        std::vector<LinPiece> clean;
        for (auto& p : out)
          if (p.lo < p.hi) clean.push_back(p);
        return clean;
      }
      std::vector<LinPiece> out;
      for (const auto& pc : f.pieces) out.push_back({pc.lo, pc.hi, pc.a, pc.b});
      if (out.empty()) out.push_back({0.0, 1.0, 0.0, f.affine_b - std::floor(f.affine_b)});
      return out;
    }
    case TwistSpec::Family::Piecewise: {
      std::vector<LinPiece> out;
      for (const auto& pc : f.pieces) out.push_back({pc.lo, pc.hi, pc.a, pc.b});
      return out;
    }
    case TwistSpec::Family::Sqrt:
      fail(Errc::Unsupported, "the doubling oracle handles linear twists only");
  }
  fail(Errc::Internal, "unreachable");
}

}  // namespace

std::vector<OracleInterval> oracle_An_intervals(long n, double psi_n,
                                                const TwistSpec& f) {
  if (n < 1 || n > 26) fail(Errc::InvalidConfig, "oracle supports 1 <= n <= 26");
  if (!(psi_n > 0)) fail(Errc::InvalidConfig, "psi must be positive");
  auto pieces = twist_pieces(f);
  double pow2n = std::ldexp(1.0, int(n));
  std::vector<OracleInterval> out;
  for (long j = 0; j < long(pow2n); ++j) {
    double blo = double(j) / pow2n, bhi = double(j + 1) / pow2n;
    for (const auto& p : pieces) {
      double lo = std::max(blo, p.lo), hi = std::min(bhi, p.hi);
      if (lo >= hi) continue;
      // |(2^n - a) x - (j + b)| < psi on [lo, hi)
      double slope = pow2n - p.a;
      if (slope == 0.0) continue;  // degenerate; not reachable for n >= 1, |a| <= 2
      double center = (double(j) + p.b) / slope;
      double hw = psi_n / std::fabs(slope);
      double s_lo = std::max(lo, center - hw);
      double s_hi = std::min(hi, center + hw);
      if (s_lo < s_hi) out.push_back({j, s_lo, s_hi});
    }
  }
  return out;
}

double oracle_leb_An(long n, double psi_n, const TwistSpec& f) {
  auto ivs = oracle_An_intervals(n, psi_n, f);
  // Kahan over the (disjoint) solution intervals
  double sum = 0.0, comp = 0.0;
  for (const auto& iv : ivs) {
    double term = iv.hi - iv.lo;
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double oracle_intersect(double a, double b, long k, double c, double d) {
  if (!(0 <= a && a <= b && b <= 1 && 0 <= c && c <= d && d <= 1))
    fail(Errc::InvalidConfig, "oracle_intersect wants subintervals of [0,1]");
  if (k < 0 || k > 52) fail(Errc::InvalidConfig, "oracle_intersect needs 0 <= k <= 52");
  double S = std::ldexp(1.0, int(k));
  double len = d - c;
  // G(t) = Leb{u in [0,t) : frac(u) in [c,d)}
  auto G = [&](double t) {
    double fl = std::floor(t);
    double frac = t - fl;
    return fl * len + std::min(std::max(frac - c, 0.0), len);
  };
  return (G(S * b) - G(S * a)) / S;
}

double oracle_joint_const_target(double y, double rm, double rn, long m, long n) {
  if (!(n > m && m >= 1)) fail(Errc::InvalidConfig, "needs n > m >= 1");
  double a = std::max(0.0, y - rm), b = std::min(1.0, y + rm);
  double c = std::max(0.0, y - rn), d = std::min(1.0, y + rn);
  return oracle_intersect(a, b, n - m, c, d);
}

}  // namespace twistrec
