#pragma once

#include <string>
#include <vector>

#include "twistrec/ball.hpp"

namespace twistrec {

enum class SeriesClass { Convergent, Divergent, Unknown };

// Target-rate function psi. Parameters are the exact binary doubles obtained
// from config parsing; brackets are directed enclosures of c * n^-s etc.
struct PsiSpec {
  enum class Family { Power, PowerLog, Constant, Table };
  Family family = Family::Power;
  double c = 1.0, s = 1.0, t = 0.0;  // power / power_log
  double constant = 0.1;             // constant
  std::vector<double> table;         // table values psi(1), psi(2), ...
  double table_tail = 0.0;           // value used beyond the table
  bool monotone = true;

  bool vanishes() const;  // lim psi(n) = 0

  static PsiSpec parse(const std::string& id);
  std::string id() const;
};

double psi_eval(const PsiSpec& psi, long n);
// Directed enclosure [lo, hi] of psi(n); decisions made against it are
// stable under precision increase.
struct PsiBracket {
  double lo, hi;
};
PsiBracket psi_bracket(const PsiSpec& psi, long n);

double series_partial(const PsiSpec& psi, double delta, long n_max);
SeriesClass series_class(const PsiSpec& psi, double delta);

std::string to_string(SeriesClass c);

}  // namespace twistrec
