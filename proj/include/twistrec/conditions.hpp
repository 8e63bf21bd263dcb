#pragma once

#include <string>
#include <vector>

#include "twistrec/measures.hpp"
#include "twistrec/systems.hpp"

namespace twistrec {

struct AhlforsReport {
  double eta1 = 0.0, eta2 = 0.0, r0 = 0.0;
  int centers = 0;
  int radii = 0;
  // mu(window) / window-length^delta; windows are clipped to the hull, so a
  // uniform density reports eta1 = eta2 = 1
  std::string note = "normalization: window-length^delta";
};

struct MixingEstimate {
  long n = 0;
  double value = 0.0;
  std::string method;  // exact_sweep | cylinder_algebra | monte_carlo | arc_overlap
};

struct PseudoMarkovResult {
  bool holds = false;
  double tau = 0.0;
  std::string witness;    // "(i,j)" on failure
  std::string partition;  // standard | refined-orbit-of-1 | analytic
};

struct ExpandingReport {
  std::vector<std::pair<int, double>> min_kj;  // (m, min over F_m of K_J)
  bool grows = false;  // min K_J grows across the tested orders
};

struct ConditionReport {
  std::string system;
  double delta = 1.0;
  AhlforsReport ahlfors;
  std::vector<MixingEstimate> mixing;
  bool mixing_decays = false;
  double distortion_k1 = 1.0;
  std::string k1_method;
  ExpandingReport expanding;
  std::string expanding_method = "closed_form";
  double kj_sum_sup = 0.0;
  std::string kj_sum_method;
  double conformality_k2 = 1.0;
  std::string k2_method;
  PseudoMarkovResult pseudo_markov;
  std::vector<std::string> flags;
};

AhlforsReport check_ahlfors(const SystemSpec& sys, int centers, int radii,
                            uint64_t seed = 5);
MixingEstimate estimate_mixing(const SystemSpec& sys, long n, int grid = 4,
                               long mc_samples = 20000, uint64_t seed = 5,
                               int threads = 1);
double check_distortion(const SystemSpec& sys, int m, long samples,
                        uint64_t seed = 5);
ExpandingReport check_expanding(const SystemSpec& sys, int m_lo, int m_hi);
double check_kj_sum(const SystemSpec& sys, int m_lo, int m_hi);
double check_conformality(const SystemSpec& sys, int m, long samples,
                          uint64_t seed = 5);
PseudoMarkovResult check_pseudo_markov(const SystemSpec& sys);

struct ConditionOptions {
  int ahlfors_centers = 21;
  int ahlfors_radii = 10;
  std::vector<long> mixing_ns = {2, 4, 6, 8, 10};
  int grid = 4;
  long mc_samples = 20000;
  int distortion_m = 6;
  long distortion_samples = 2000;
  int expanding_m_hi = 12;
  uint64_t seed = 5;
  int threads = 1;
};
ConditionReport full_conditions(const SystemSpec& sys,
                                const ConditionOptions& opt = {});

}  // namespace twistrec
