#pragma once

#include <string>
#include <vector>

#include "twistrec/systems.hpp"

namespace twistrec {

// Twist function f with certified evaluation and Lipschitz bookkeeping.
// Families with a mod-1 wrap or an unbounded derivative are carried as
// piecewise data so the per-piece constants stay honest.
struct TwistSpec {
  enum class Family { Identity, Constant, Affine, Sqrt, Piecewise };
  Family family = Family::Identity;
  double constant_y = 0.0;
  double affine_a = 1.0, affine_b = 0.0;
  bool affine_mod1 = false;  // false: clip to [0,1]

  struct Piece {
    double lo, hi;     // half-open [lo, hi)
    double a, b;       // leaf f(x) = a x + b on the piece
    double lipschitz;  // |a|
  };
  std::vector<Piece> pieces;  // Piecewise (and the affine mod-1 realization)

  // Global Lipschitz constant; +inf for sqrt (per-piece constants are finite).
  double lipschitz_p() const;
  // Lipschitz bound valid on the dyadic piece containing x (sqrt), or the
  // global constant otherwise.
  double local_lipschitz(double x) const;

  static TwistSpec parse(const std::string& id);
  std::string id() const;
};

CertifiedPoint eval_twist(const TwistSpec& f, const CertifiedPoint& x);

enum class Commutes { Yes, No, Inconclusive };
Commutes commutes_with(const TwistSpec& f, const SystemSpec& sys, int trials,
                       uint64_t seed = 7);
std::string to_string(Commutes c);

}  // namespace twistrec
