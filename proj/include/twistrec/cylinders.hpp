#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "twistrec/stats.hpp"
#include "twistrec/systems.hpp"

namespace twistrec {

// Greedy beta-expansion of 1 together with the modified sequence xi*.
// Digits and remainders are exact for every reachable beta (integers are
// handled separately; decimals are rationals; golden/tribonacci live in
// Q(beta)), so "remainder is exactly zero" is a certified statement.
struct ParryCoding {
  const BetaNumber* base = nullptr;
  std::vector<long> xi;          // xi_1 .. xi_n
  std::vector<QBeta> remainders; // T^k(1) for k = 0..n; remainders[0] = 1
  std::optional<int> m_xi;       // last nonzero index, when xi is eventually zero
  bool zero_status_known = true; // false: no zero remainder within the budget

  long xi_star(long n) const;  // 1-based
};

ParryCoding parry_digits(const BetaNumber& beta, int n);

bool is_admissible(const std::vector<long>& word, const ParryCoding& parry);

// Exact geometry of a beta-cylinder: realized interval [left, left + len)
// with len = beta^-order * image_hi and T^order J = [0, image_hi).
struct BetaCylinder {
  bool nonempty = false;
  int order = 0;
  QBeta left;
  QBeta image_hi;
  QBeta length(const BetaNumber& beta) const;
};
BetaCylinder beta_cylinder(const BetaNumber& beta, const std::vector<long>& word);

struct CylinderOptions {
  long max_count = 2'000'000;  // ExplosionGuard
  int gauss_digit_cap = 50;
  int prec = 192;  // reporting precision for interval snapshots
};

struct CylinderEntry {
  std::vector<long> word;
  Ival left, right, length;
  double k_j = 1.0;
  bool is_full = false;    // Beta only
  bool borderline = false; // fullness undecided within tolerance (inexact backends)
};

// Lexicographic stream of the nonempty cylinders of order m.
void for_each_cylinder(const SystemSpec& sys, int m, const CylinderOptions& opt,
                       const std::function<void(const CylinderEntry&)>& fn);
std::vector<CylinderEntry> cylinders_of_order(const SystemSpec& sys, int m,
                                              const CylinderOptions& opt = {});

// Full subcylinder I of J per the append-zeros construction; Leb(I) >= Leb(J)/beta.
std::vector<long> full_subcylinder(const SystemSpec& sys, const std::vector<long>& word);

// Sum of K_J^-delta over F_m. Exact closed form for IFS; enumerated for Beta;
// an upper bracket (capped sum plus tail bound) for Gauss.
double kj_sum(const SystemSpec& sys, int m, const CylinderOptions& opt = {});

// Upper bound on the mass of order-m Gauss words containing a digit > cap.
double gauss_tail_mass(int m, int cap);

// min over F_m of K_J (closed form; no enumeration).
double min_kj(const SystemSpec& sys, int m);

}  // namespace twistrec
