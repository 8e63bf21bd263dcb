#pragma once

#include <vector>

#include "twistrec/targets.hpp"
#include "twistrec/twists.hpp"

namespace twistrec {

// Exact piecewise-linear computations for the doubling map T x = 2x mod 1
// (Lebesgue invariant). These are the independent baselines the Monte Carlo
// estimators are tested against; nothing here touches the estimator path.

// Leb{x : |T^n x - f(x)| < psi_n} by the exhaustive 2^n-branch solve.
// Supports f in {identity, constant, affine (mod-1 or clipped w/ a != 2^n)}.
double oracle_leb_An(long n, double psi_n, const TwistSpec& f);

// Per-branch solution intervals (clipped); mainly for the CLI `oracle` dump.
struct OracleInterval {
  long branch;
  double lo, hi;
};
std::vector<OracleInterval> oracle_An_intervals(long n, double psi_n,
                                                const TwistSpec& f);

// Leb(B cap T^-k F) for intervals B = [a,b), F = [c,d) in [0,1), exact sweep.
double oracle_intersect(double a, double b, long k, double c, double d);

// Leb(T^-m B(y,rm) cap T^-n B(y,rn)) for n > m, via the sweep identity
// Leb(B(y,rm) cap T^-(n-m) B(y,rn)).
double oracle_joint_const_target(double y, double rm, double rn, long m, long n);

}  // namespace twistrec
