#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twistrec/measures.hpp"
#include "twistrec/systems.hpp"
#include "twistrec/targets.hpp"
#include "twistrec/twists.hpp"

namespace twistrec {

enum class HitState { Hit, Miss, Indeterminate };

struct HitRecord {
  long point_index = 0;
  std::vector<long> hit_times;
  std::vector<long> indeterminate_times;
  long horizon = 0;
};

struct RunConfig {
  long samples = 1000;
  uint64_t seed = 1;
  int threads = 1;
  int min_precision = 0;  // 0: per-system policy
  int max_precision = 1 << 15;
  uint32_t stream = 0;
  double indeterminate_budget = 0.01;  // IndeterminateExcess threshold
  double confidence_z = 1.959963984540054;  // 95%
};

// Certified test of d(T^n x, f(x)) < psi(n) for one enclosure. The working
// precision escalates up to max_prec; Indeterminate is a value, not an error,
// and decisions are stable under further precision increase.
HitState hit_test(const SystemSpec& sys, const TwistSpec& f, const PsiSpec& psi,
                  const CertifiedPoint& x, long n, int max_prec = 1 << 15);

// Hit/miss/indeterminate profile of sample point `index` at each n in
// test_ns (sorted ascending). Escalates precision per point; refines the
// sampled point through its tape.
std::vector<HitState> profile_point(const Measure& mu, const TwistSpec& f,
                                    const PsiSpec& psi,
                                    const std::vector<long>& test_ns,
                                    uint64_t seed, uint64_t index,
                                    uint32_t stream, int max_prec);

MeasureEstimate estimate_mu_An(const SystemSpec& sys, const TwistSpec& f,
                               const PsiSpec& psi, long n, const RunConfig& rc);

// a_n used in quasi-independence bounds, with its provenance.
struct MixingRate {
  double value = 0.0;
  std::string source;  // closed_form_ifs | closed_form_beta_int | user | estimate
};
MixingRate mixing_rate(const SystemSpec& sys, long n, double user_a_n = -1.0,
                       const std::string& user_label = "user");

struct QuasiIndependenceReport {
  long m = 0, n = 0;
  MeasureEstimate est_joint;
  MeasureEstimate marg_m, marg_n;
  double bound_value = 0.0;
  double ratio = 0.0;
  std::string a_source;
};
QuasiIndependenceReport estimate_pairwise(const SystemSpec& sys, const TwistSpec& f,
                                          const PsiSpec& psi, long m, long n,
                                          const RunConfig& rc, double user_a_n = -1.0,
                                          const std::string& a_label = "user");

// All pairs m < n in [m_lo, m_hi] from one pass over the sample stream
// (common random numbers across marginals and joints).
struct PairwiseGrid {
  long m_lo = 0, m_hi = 0;
  long samples = 0;
  uint64_t seed = 0;
  long indeterminate_points = 0;
  std::vector<QuasiIndependenceReport> reports;
};
PairwiseGrid pairwise_grid(const SystemSpec& sys, const TwistSpec& f,
                           const PsiSpec& psi, long m_lo, long m_hi,
                           const RunConfig& rc, double user_a_n = -1.0,
                           const std::string& a_label = "user");

struct HitStatistics {
  std::vector<HitRecord> records;
  std::vector<double> mu_hat;   // per-n hit fraction, n = 1..N
  std::vector<long> hit_counts; // per-n certified hits
  std::vector<long> indet_counts;
  double mean_sn = 0.0;         // average #hits up to N == sum of mu_hat
  double tail_fraction = 0.0;   // points with >= 1 hit in (N/2, N]
  long horizon = 0;
  long samples = 0;
  long indeterminate_total = 0;
};
HitStatistics hit_statistics(const SystemSpec& sys, const TwistSpec& f,
                             const PsiSpec& psi, long N, const RunConfig& rc,
                             bool keep_records = true);

struct VerdictReport {
  std::string verdict;  // empirically_full | empirically_null | inconclusive
  SeriesClass series = SeriesClass::Unknown;
  double tail_fraction = 0.0;
  double theta_full = 0.9, theta_null = 0.1;
  double sum_psi_delta = 0.0;  // partial sum over n <= N
  double sum_mu_hat = 0.0;
  long horizon = 0, samples = 0;
  bool conditions_applicable = true;
  std::vector<std::string> flags;
};
VerdictReport verdict(const SystemSpec& sys, const TwistSpec& f, const PsiSpec& psi,
                      long N, const RunConfig& rc, double theta_full = 0.9,
                      double theta_null = 0.1);

// Chung-Erdos lower bound: max over prefixes N of
// (sum_{n<=N} mu_n)^2 / sum_{n,m<=N} joint_{n,m}.
double chung_erdos_bound(const std::vector<double>& mu_vec,
                         const std::vector<std::vector<double>>& joint);

double posmeas_bound(double s1, double s2);

// Predicted diameter of J cap A_m for cylinders of order m (diagnostic).
double lemma42_radius(const SystemSpec& sys, const PsiSpec& psi, long m, double p);

}  // namespace twistrec
