#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twistrec/algebraic.hpp"
#include "twistrec/ball.hpp"

namespace twistrec {

enum class SystemKind { Beta, Gauss, Ifs, Rotation };

// One contraction theta_i(x) = ratio * x + shift of an IFS.
struct IfsMap {
  mpq_class ratio;
  mpq_class shift;
};

struct SystemSpec {
  SystemKind kind = SystemKind::Beta;

  BetaNumber beta = BetaNumber::integer(2);  // Beta
  std::vector<IfsMap> maps;                  // Ifs
  bool rotation_golden = true;               // Rotation: (sqrt(5)-1)/2
  mpq_class rotation_alpha;                  // Rotation: exact decimal input

  // Ahlfors dimension delta; 1 except for IFS, where it solves sum r_i^d = 1.
  double delta = 1.0;
  // High-precision enclosure of delta (meaningful for IFS).
  CertifiedPoint delta_ball = CertifiedPoint::exact(1.0, 64);

  // Interval hull of the attractor (IFS); [0,1] otherwise.
  mpq_class hull_lo = 0, hull_hi = 1;
  // theta_i(hull) per branch, sorted by left endpoint (IFS only).
  struct IfsCell {
    mpq_class lo, hi;
    int branch;  // index into maps
  };
  std::vector<IfsCell> cells;

  long branch_count() const;  // -1 for countably many (Gauss)
  bool countable_branches() const { return kind == SystemKind::Gauss; }
  double min_contraction() const;  // min r_i (IFS)
  double max_contraction() const;  // max r_i (IFS)

  // Enclosure of the rotation angle reduced mod 1.
  CertifiedPoint rotation_angle(int prec) const;

  static SystemSpec parse(const std::string& id);
  std::string id() const;
};

enum class StepStatus { Ok, Straddle, DigitOverflow, PrecisionLoss };

struct StepOutcome {
  StepStatus status = StepStatus::Ok;
  long digit = 0;
};

// Applies T once per call, reusing scratch buffers; create one per orbit.
// Pure apart from internal scratch: two steppers fed the same inputs at the
// same precision produce identical outputs.
class Stepper {
public:
  virtual ~Stepper() = default;
  // Replaces x by an enclosure of T(x); reports the branch index used.
  virtual StepOutcome step(CertifiedPoint& x) = 0;
};

std::unique_ptr<Stepper> make_stepper(const SystemSpec& sys, int prec);

struct OrbitEntry {
  long digit;           // branch index of the preimage point
  CertifiedPoint point; // enclosure of T^k x
};

struct OrbitResult {
  std::vector<OrbitEntry> steps;           // entries for k = 1..n (shorter on error)
  std::optional<StepStatus> error;         // set if the orbit stopped early
  int error_step = -1;                     // 1-based step at which it stopped
};

CertifiedPoint apply(const SystemSpec& sys, const CertifiedPoint& x);
OrbitResult orbit(const SystemSpec& sys, const CertifiedPoint& x, long n);
long branch_index(const SystemSpec& sys, const CertifiedPoint& x);

// Working precision policy for an n-step orbit; expansion is the only
// source of error growth, so this is a per-system closed form (Gauss
// starts at 256 bits and relies on adaptive escalation).
int required_precision(const SystemSpec& sys, long n);

}  // namespace twistrec
