#include "twistrec/targets.hpp"

#include <cmath>

#include "twistrec/errors.hpp"

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

}  // namespace

bool PsiSpec::vanishes() const {
  switch (family) {
    case Family::Power:
    case Family::PowerLog: return true;              // s > 0 enforced at parse
    case Family::Constant: return constant == 0.0;   // never, in practice
    case Family::Table: return table_tail == 0.0;
  }
  return false;
}

PsiSpec PsiSpec::parse(const std::string& id) {
  auto colon = id.find(':');
  std::string head = colon == std::string::npos ? id : id.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  PsiSpec p;
  if (head == "power") {
    auto args = split(tail, ',');
    if (args.size() != 2) fail(Errc::InvalidConfig, "psi power needs 'c,s': " + id);
    p.family = Family::Power;
    p.c = parse_double(args[0]);
    p.s = parse_double(args[1]);
    if (p.c <= 0 || p.s <= 0) fail(Errc::InvalidConfig, "psi power needs c,s > 0");
    return p;
  }
  if (head == "powerlog" || head == "power_log") {
    auto args = split(tail, ',');
    if (args.size() != 3) fail(Errc::InvalidConfig, "psi powerlog needs 'c,s,t': " + id);
    p.family = Family::PowerLog;
    p.c = parse_double(args[0]);
    p.s = parse_double(args[1]);
    p.t = parse_double(args[2]);
    if (p.c <= 0 || p.s <= 0) fail(Errc::InvalidConfig, "psi powerlog needs c,s > 0");
    return p;
  }
  if (head == "const" || head == "constant") {
    p.family = Family::Constant;
    p.constant = parse_double(tail);
    if (p.constant <= 0) fail(Errc::InvalidConfig, "psi const needs a positive value");
    return p;
  }
  if (head == "table") {
    auto args = split(tail, ',');
    if (args.empty()) fail(Errc::InvalidConfig, "psi table needs values");
    p.family = Family::Table;
    for (const auto& a : args) p.table.push_back(parse_double(a));
    p.table_tail = p.table.back();
    p.monotone = true;
    for (size_t i = 1; i < p.table.size(); ++i)
      if (p.table[i] > p.table[i - 1]) p.monotone = false;
    for (double v : p.table)
      if (v <= 0) fail(Errc::InvalidConfig, "psi table values must be positive");
    return p;
  }
  fail(Errc::InvalidConfig, "unknown psi family: " + id);
}

std::string PsiSpec::id() const {
  char buf[128];
  switch (family) {
    case Family::Power:
      std::snprintf(buf, sizeof buf, "power:%.17g,%.17g", c, s);
      return buf;
    case Family::PowerLog:
      std::snprintf(buf, sizeof buf, "powerlog:%.17g,%.17g,%.17g", c, s, t);
      return buf;
    case Family::Constant:
      std::snprintf(buf, sizeof buf, "const:%.17g", constant);
      return buf;
    case Family::Table: {
      std::string out = "table:";
      for (size_t i = 0; i < table.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", table[i]);
        out += buf;
      }
      return out;
    }
  }
  return "?";
}

double psi_eval(const PsiSpec& psi, long n) {
  if (n < 1) fail(Errc::InvalidConfig, "psi is defined for n >= 1");
  switch (psi.family) {
    case PsiSpec::Family::Power:
      return psi.c * std::pow(double(n), -psi.s);
    case PsiSpec::Family::PowerLog:
      return psi.c * std::pow(double(n), -psi.s) *
             std::pow(std::log(double(n) + 1.0), -psi.t);
    case PsiSpec::Family::Constant:
      return psi.constant;
    case PsiSpec::Family::Table:
      if (n <= long(psi.table.size())) return psi.table[size_t(n - 1)];
      return psi.table_tail;
  }
  return 0.0;
}

PsiBracket psi_bracket(const PsiSpec& psi, long n) {
  if (psi.family == PsiSpec::Family::Constant)
    return {psi.constant, psi.constant};
  if (psi.family == PsiSpec::Family::Table) {
    double v = psi_eval(psi, n);
    return {v, v};
  }
  const int wp = 96;
  auto eval = [&](mpfr_rnd_t rnd) {
    BigFloat nn(double(n), wp);
    BigFloat e(-psi.s, wp);
    BigFloat r = bf_pow(nn, e, wp, rnd);
    BigFloat cc(psi.c, wp);
    r = bf_mul(r, cc, wp, rnd);
    if (psi.family == PsiSpec::Family::PowerLog) {
      BigFloat np1(double(n) + 1.0, wp);
      // (log(n+1))^-t, directed consistently: log(n+1) > 1 is not guaranteed
      // for n = 1, so round the base opposite to the overall direction when
      // the exponent is negative.
      mpfr_rnd_t inner = psi.t >= 0 ? (rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU) : rnd;
      BigFloat lg = bf_log(np1, wp, inner);
      BigFloat mt(-psi.t, wp);
      BigFloat lf = bf_pow(lg, mt, wp, rnd);
      r = bf_mul(r, lf, wp, rnd);
    }
    return r;
  };
  double lo = eval(MPFR_RNDD).to_double(MPFR_RNDD);
  double hi = eval(MPFR_RNDU).to_double(MPFR_RNDU);
  return {lo, hi};
}

double series_partial(const PsiSpec& psi, double delta, long n_max) {
  if (n_max < 1) fail(Errc::InvalidConfig, "series_partial needs N >= 1");
  // Kahan summation in ascending n; deterministic.
  double sum = 0.0, comp = 0.0;
  for (long n = 1; n <= n_max; ++n) {
    double term = std::pow(psi_eval(psi, n), delta);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

SeriesClass series_class(const PsiSpec& psi, double delta) {
  switch (psi.family) {
    case PsiSpec::Family::Power:
      // p-series: sum n^(-s delta)
      return psi.s * delta > 1.0 ? SeriesClass::Convergent : SeriesClass::Divergent;
    case PsiSpec::Family::PowerLog: {
      double u = psi.s * delta, v = psi.t * delta;
      if (u > 1.0) return SeriesClass::Convergent;
      if (u < 1.0) return SeriesClass::Divergent;
      return v > 1.0 ? SeriesClass::Convergent : SeriesClass::Divergent;
    }
    case PsiSpec::Family::Constant:
      return SeriesClass::Divergent;
    case PsiSpec::Family::Table:
      return SeriesClass::Unknown;
  }
  return SeriesClass::Unknown;
}

std::string to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::Convergent: return "convergent";
    case SeriesClass::Divergent: return "divergent";
    case SeriesClass::Unknown: return "unknown";
  }
  return "?";
}

}  // namespace twistrec
