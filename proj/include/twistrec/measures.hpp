#pragma once

#include <cstdint>

#include "twistrec/cylinders.hpp"
#include "twistrec/rng.hpp"
#include "twistrec/stats.hpp"
#include "twistrec/systems.hpp"

namespace twistrec {

struct BallMeasureBracket {
  enum class Method { ClosedForm, TruncatedSeries, CylinderCover };
  double low = 0.0, high = 0.0;
  Method method = Method::ClosedForm;
};

// Monte Carlo estimate with its provenance.
struct MeasureEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0, ci_high = 1.0;
  long n_samples = 0;
  uint64_t seed = 0;
  long indeterminate_count = 0;
};

// Invariant-measure evaluator and sampler bound to one system. Pure and
// thread-safe after construction.
class Measure {
public:
  explicit Measure(const SystemSpec& sys);

  // mu([a,b] cap X) as a rigorous bracket.
  Ival interval(double a, double b, int ifs_depth = -1) const;
  BallMeasureBracket ball(double center, double r, int ifs_depth = -1) const;

  // Normalized invariant density (Beta and Gauss; Rotation returns 1).
  double density(double x) const;
  // Density bracket against an x-enclosure (Beta only; used by rejection).
  Ival density_bracket(double x_lo, double x_hi) const;

  // Deterministic (seed, stream, index) -> point distributed per mu.
  CertifiedPoint sample(uint64_t seed, uint64_t index, int prec,
                        uint32_t stream = 0) const;

  // Normalizing constant of the Renyi series (sum T^k(1)/beta^k), exposed
  // for reports; 1 for the other systems.
  Ival renyi_normalizer() const { return F_; }

  const SystemSpec& system() const { return sys_; }

private:
  CertifiedPoint sample_renyi(uint64_t seed, uint64_t index, int prec,
                              uint32_t stream) const;
  CertifiedPoint sample_ifs(uint64_t seed, uint64_t index, int prec,
                            uint32_t stream) const;
  Ival beta_interval(double a, double b) const;
  Ival ifs_interval(double a, double b, int depth) const;

  SystemSpec sys_;
  // Beta (non-integer): the digits-of-1 orbit v_k = T^k(1) with directed
  // brackets, truncated so the tail is below kSeriesTailTarget.
  int K_ = 0;
  std::vector<Ival> orbit1_;
  std::vector<Ival> beta_pow_;  // beta^-k brackets, k = 0..K
  Ival F_ = Ival::exact(1.0);
  double tail_ = 0.0;      // upper bound on the unnormalized series tail
  bool tail_ok_ = true;    // truncation met its target within the term cap
  double envelope_ = 1.0;  // rejection envelope M >= sup density
  // IFS: per-branch weights r_i^delta and their prefix sums.
  std::vector<Ival> weight_;
  std::vector<Ival> cum_;
};

}  // namespace twistrec
