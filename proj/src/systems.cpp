#include "twistrec/systems.hpp"

#include <algorithm>
#include <cmath>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

// Solves sum_i r_i^d = 1 for d in (0, 1] by bisection at high precision.
CertifiedPoint solve_ifs_dimension(const std::vector<IfsMap>& maps) {
  const int wp = 320;
  auto f = [&](const BigFloat& d) {
    // sum r_i^d - 1, rounded to nearest; the bisection tolerance dominates.
    BigFloat acc(wp);
    mpfr_set_si(acc.raw(), -1, MPFR_RNDN);
    for (const auto& m : maps) {
      BigFloat r(wp);
      mpfr_set_q(r.raw(), m.ratio.get_mpq_t(), MPFR_RNDN);
      BigFloat term = bf_pow(r, d, wp);
      mpfr_add(acc.raw(), acc.raw(), term.raw(), MPFR_RNDN);
    }
    return acc;
  };
  BigFloat lo(1e-9, wp), hi(1.0, wp);
  if (f(hi).sign() > 0) {
    // sum r_i > 1 cannot happen under the open set condition on a line.
    fail(Errc::InvalidConfig, "IFS contraction ratios sum above 1");
  }
  for (int it = 0; it < wp - 40; ++it) {
    BigFloat mid = bf_div(bf_add(lo, hi, wp), BigFloat(2.0, 8), wp);
    if (f(mid).sign() > 0)
      lo = mid;
    else
      hi = mid;
  }
  BigFloat mid = bf_div(bf_add(lo, hi, wp), BigFloat(2.0, 8), wp);
  BigFloat rad = rad_add(rad_mul(bf_sub(hi, lo, kRadPrec, MPFR_RNDU), 0.5),
                         ulp_bound(mid, wp, 8));
  return CertifiedPoint{std::move(mid), std::move(rad), wp};
}

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

}  // namespace

long SystemSpec::branch_count() const {
  switch (kind) {
    case SystemKind::Beta: return beta.branch_count();
    case SystemKind::Gauss: return -1;
    case SystemKind::Ifs: return static_cast<long>(maps.size());
    case SystemKind::Rotation: return 2;
  }
  return 0;
}

double SystemSpec::min_contraction() const {
  double r = 1.0;
  for (const auto& m : maps) r = std::min(r, m.ratio.get_d());
  return r;
}

double SystemSpec::max_contraction() const {
  double r = 0.0;
  for (const auto& m : maps) r = std::max(r, m.ratio.get_d());
  return r;
}

CertifiedPoint SystemSpec::rotation_angle(int prec) const {
  if (rotation_golden) {
    BigFloat s = bf_sqrt_ui(5, prec + 4);
    BigFloat v(prec);
    mpfr_sub_ui(v.raw(), s.raw(), 1, MPFR_RNDN);
    mpfr_div_2ui(v.raw(), v.raw(), 1, MPFR_RNDN);
    BigFloat rad = ulp_bound(v, prec, 4);
    return CertifiedPoint{std::move(v), std::move(rad), prec};
  }
  mpq_class a = rotation_alpha;
  // reduce mod 1 exactly
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), a.get_num().get_mpz_t(), a.get_den().get_mpz_t());
  a -= mpq_class(fl);
  BigFloat v(prec);
  mpfr_set_q(v.raw(), a.get_mpq_t(), MPFR_RNDN);
  BigFloat rad = ulp_bound(v, prec, 1);
  return CertifiedPoint{std::move(v), std::move(rad), prec};
}

SystemSpec SystemSpec::parse(const std::string& id) {
  SystemSpec s;
  auto colon = id.find(':');
  std::string head = colon == std::string::npos ? id : id.substr(0, colon);
  std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (head == "beta") {
    if (tail.empty()) fail(Errc::InvalidConfig, "beta preset needs a value, e.g. beta:2");
    s.kind = SystemKind::Beta;
    s.beta = BetaNumber::parse(tail);
    s.delta = 1.0;
    s.delta_ball = CertifiedPoint::exact(1.0, 64);
    return s;
  }
  if (head == "gauss") {
    s.kind = SystemKind::Gauss;
    s.delta = 1.0;
    s.delta_ball = CertifiedPoint::exact(1.0, 64);
    return s;
  }
  if (head == "rotation") {
    s.kind = SystemKind::Rotation;
    s.delta = 1.0;
    s.delta_ball = CertifiedPoint::exact(1.0, 64);
    if (tail == "golden" || tail.empty()) {
      s.rotation_golden = true;
    } else {
      s.rotation_golden = false;
      s.rotation_alpha = parse_decimal(tail);
    }
    return s;
  }
  if (head == "ifs") {
    s.kind = SystemKind::Ifs;
    if (tail == "cantor3") {
      s.maps = {{mpq_class(1, 3), mpq_class(0)}, {mpq_class(1, 3), mpq_class(2, 3)}};
    } else {
      for (const auto& part : split(tail, ';')) {
        auto rt = split(part, ',');
        if (rt.size() != 2) fail(Errc::InvalidConfig, "ifs map needs 'ratio,shift': " + part);
        IfsMap m{parse_decimal(rt[0]), parse_decimal(rt[1])};
        if (m.ratio <= 0 || m.ratio >= 1)
          fail(Errc::InvalidConfig, "ifs ratio must lie in (0,1): " + part);
        s.maps.push_back(std::move(m));
      }
      if (s.maps.size() < 2) fail(Errc::InvalidConfig, "ifs needs at least two maps");
    }
    // Hull from the fixed points t_i / (1 - r_i).
    mpq_class lo, hi;
    bool first = true;
    for (const auto& m : s.maps) {
      mpq_class fix = m.shift / (1 - m.ratio);
      if (first || fix < lo) lo = fix;
      if (first || fix > hi) hi = fix;
      first = false;
    }
    s.hull_lo = lo;
    s.hull_hi = hi;
    for (size_t i = 0; i < s.maps.size(); ++i) {
      mpq_class clo = s.maps[i].ratio * lo + s.maps[i].shift;
      mpq_class chi = s.maps[i].ratio * hi + s.maps[i].shift;
      s.cells.push_back({clo, chi, int(i)});
    }
    std::sort(s.cells.begin(), s.cells.end(),
              [](const IfsCell& a, const IfsCell& b) { return a.lo < b.lo; });
    // Open set condition witness: interiors of theta_i(hull) must be disjoint.
    for (size_t i = 1; i < s.cells.size(); ++i) {
      if (s.cells[i].lo < s.cells[i - 1].hi)
        fail(Errc::InvalidConfig, "ifs cells overlap; open set condition fails");
    }
    s.delta_ball = solve_ifs_dimension(s.maps);
    s.delta = s.delta_ball.mid.to_double();
    return s;
  }
  fail(Errc::InvalidConfig, "unknown system id: " + id);
}

std::string SystemSpec::id() const {
  switch (kind) {
    case SystemKind::Beta: return beta.describe();
    case SystemKind::Gauss: return "gauss";
    case SystemKind::Rotation:
      if (rotation_golden) return "rotation:golden";
      return "rotation:" + rotation_alpha.get_str();
    case SystemKind::Ifs: {
      if (maps.size() == 2 && maps[0].ratio == mpq_class(1, 3) &&
          maps[0].shift == 0 && maps[1].ratio == mpq_class(1, 3) &&
          maps[1].shift == mpq_class(2, 3))
        return "ifs:cantor3";
      std::string out = "ifs:";
      for (size_t i = 0; i < maps.size(); ++i) {
        if (i) out += ";";
        out += maps[i].ratio.get_str() + "," + maps[i].shift.get_str();
      }
      return out;
    }
  }
  return "?";
}

int required_precision(const SystemSpec& sys, long n) {
  switch (sys.kind) {
    case SystemKind::Beta: {
      double lb = std::log2(sys.beta.upper_double());
      return static_cast<int>(std::ceil(double(n) * lb)) + 64;
    }
    case SystemKind::Gauss:
      return 256;
    case SystemKind::Ifs: {
      double lb = std::log2(1.0 / sys.min_contraction());
      return static_cast<int>(std::ceil(double(n) * lb)) + 64;
    }
    case SystemKind::Rotation:
      return 128 + static_cast<int>(std::ceil(std::log2(double(n) + 2)));
  }
  return 128;
}

// ---------------------------------------------------------------------------

namespace {

class BetaStepper final : public Stepper {
public:
  BetaStepper(const SystemSpec& sys, int prec)
      : prec_(prec),
        max_digit_(sys.beta.is_integer() ? sys.beta.integer_value() - 1
                                         : sys.beta.floor()),
        ylo_(prec + 8),
        yhi_(prec + 8) {
    CertifiedPoint b = sys.beta.approx(prec + 8);
    blo_ = b.lo();
    bhi_ = b.hi();
  }

  StepOutcome step(CertifiedPoint& x) override {
    // y = beta*x - d, with d = floor(beta*x); everything here is >= 0.
    mpfr_mul(ylo_.raw(), blo_.raw(), x.lo().raw(), MPFR_RNDD);
    mpfr_mul(yhi_.raw(), bhi_.raw(), x.hi().raw(), MPFR_RNDU);
    if (ylo_.sign() < 0) mpfr_set_zero(ylo_.raw(), 1);
    long d1 = mpfr_get_si(ylo_.raw(), MPFR_RNDD);
    long d2 = mpfr_get_si(yhi_.raw(), MPFR_RNDD);
    if (d1 != d2) return {StepStatus::Straddle, d1};
    if (d1 > max_digit_) return {StepStatus::Straddle, d1};
    mpfr_sub_si(ylo_.raw(), ylo_.raw(), d1, MPFR_RNDD);
    mpfr_sub_si(yhi_.raw(), yhi_.raw(), d1, MPFR_RNDU);
    recenter_into(x, ylo_, yhi_, prec_);
    return {StepStatus::Ok, d1};
  }

private:
  int prec_;
  long max_digit_;
  BigFloat ylo_, yhi_;
  BigFloat blo_, bhi_;
};

class GaussStepper final : public Stepper {
public:
  GaussStepper(int prec) : prec_(prec), ulo_(prec + 8), uhi_(prec + 8), radcap_(8) {
    mpfr_set_ui_2exp(radcap_.raw(), 1, -32, MPFR_RNDN);
  }

  StepOutcome step(CertifiedPoint& x) override {
    BigFloat xlo = x.lo(), xhi = x.hi();
    if (xlo.sign() <= 0) return {StepStatus::Straddle, 0};
    // u = 1/x is decreasing.
    mpfr_ui_div(ulo_.raw(), 1, xhi.raw(), MPFR_RNDD);
    mpfr_ui_div(uhi_.raw(), 1, xlo.raw(), MPFR_RNDU);
    static const double kDigitCap = 9007199254740992.0;  // 2^53
    if (uhi_.cmp(kDigitCap) >= 0) return {StepStatus::DigitOverflow, 0};
    long d1 = mpfr_get_si(ulo_.raw(), MPFR_RNDD);
    long d2 = mpfr_get_si(uhi_.raw(), MPFR_RNDD);
    if (d1 != d2) return {StepStatus::Straddle, d1};
    mpfr_sub_si(ulo_.raw(), ulo_.raw(), d1, MPFR_RNDD);
    mpfr_sub_si(uhi_.raw(), uhi_.raw(), d1, MPFR_RNDU);
    recenter_into(x, ulo_, uhi_, prec_);
    if (x.rad.cmp(radcap_) > 0) return {StepStatus::PrecisionLoss, d1};
    return {StepStatus::Ok, d1};
  }

private:
  int prec_;
  BigFloat ulo_, uhi_;
  BigFloat radcap_;
};

class IfsStepper final : public Stepper {
public:
  IfsStepper(const SystemSpec& sys, int prec) : sys_(&sys), prec_(prec), ylo_(prec + 8), yhi_(prec + 8) {
    for (const auto& c : sys.cells) {
      BigFloat lo(prec + 8), hi(prec + 8);
      mpfr_set_q(lo.raw(), c.lo.get_mpq_t(), MPFR_RNDD);
      mpfr_set_q(hi.raw(), c.hi.get_mpq_t(), MPFR_RNDU);
      cell_lo_.push_back(std::move(lo));
      cell_hi_.push_back(std::move(hi));
    }
  }

  StepOutcome step(CertifiedPoint& x) override {
    BigFloat xlo = x.lo(), xhi = x.hi();
    int found = -1;
    for (size_t i = 0; i < cell_lo_.size(); ++i) {
      bool disjoint = xhi < cell_lo_[i] || xlo > cell_hi_[i];
      if (disjoint) continue;
      if (found >= 0) return {StepStatus::Straddle, sys_->cells[found].branch};
      found = int(i);
    }
    if (found < 0) return {StepStatus::Straddle, 0};
    const IfsMap& m = sys_->maps[sys_->cells[found].branch];
    // T|X_i = theta_i^{-1}: y = (x - t) / r, increasing.
    mpfr_sub_q(ylo_.raw(), xlo.raw(), m.shift.get_mpq_t(), MPFR_RNDD);
    mpfr_div_q(ylo_.raw(), ylo_.raw(), m.ratio.get_mpq_t(), MPFR_RNDD);
    mpfr_sub_q(yhi_.raw(), xhi.raw(), m.shift.get_mpq_t(), MPFR_RNDU);
    mpfr_div_q(yhi_.raw(), yhi_.raw(), m.ratio.get_mpq_t(), MPFR_RNDU);
    recenter_into(x, ylo_, yhi_, prec_);
    return {StepStatus::Ok, sys_->cells[found].branch};
  }

private:
  const SystemSpec* sys_;
  int prec_;
  BigFloat ylo_, yhi_;
  std::vector<BigFloat> cell_lo_, cell_hi_;
};

// Rotation steps are evaluated by multiply-reduce from the initial point, so
// the enclosure of T^n x carries one rounding, not n accumulated additions.
class RotationStepper final : public Stepper {
public:
  RotationStepper(const SystemSpec& sys, int prec)
      : prec_(prec), alpha_(sys.rotation_angle(prec + 16)), n_(0), ylo_(prec + 16), yhi_(prec + 16) {}

  StepOutcome step(CertifiedPoint& x) override {
    if (n_ == 0) x0_ = x;
    ++n_;
    // y = x0 + n*alpha; digit = wraps this step (0 or 1).
    mpfr_mul_si(ylo_.raw(), alpha_.lo().raw(), n_, MPFR_RNDD);
    mpfr_add(ylo_.raw(), ylo_.raw(), x0_.lo().raw(), MPFR_RNDD);
    mpfr_mul_si(yhi_.raw(), alpha_.hi().raw(), n_, MPFR_RNDU);
    mpfr_add(yhi_.raw(), yhi_.raw(), x0_.hi().raw(), MPFR_RNDU);
    long f1 = mpfr_get_si(ylo_.raw(), MPFR_RNDD);
    long f2 = mpfr_get_si(yhi_.raw(), MPFR_RNDD);
    if (f1 != f2) return {StepStatus::Straddle, 0};
    mpfr_sub_si(ylo_.raw(), ylo_.raw(), f1, MPFR_RNDD);
    mpfr_sub_si(yhi_.raw(), yhi_.raw(), f1, MPFR_RNDU);
    long prev_wraps = prev_floor_;
    prev_floor_ = f1;
    recenter_into(x, ylo_, yhi_, prec_);
    return {StepStatus::Ok, f1 - prev_wraps};
  }

private:
  int prec_;
  CertifiedPoint alpha_;
  CertifiedPoint x0_ = CertifiedPoint::exact(0.0, 8);
  long n_;
  long prev_floor_ = 0;
  BigFloat ylo_, yhi_;
};

}  // namespace

std::unique_ptr<Stepper> make_stepper(const SystemSpec& sys, int prec) {
  switch (sys.kind) {
    case SystemKind::Beta: return std::make_unique<BetaStepper>(sys, prec);
    case SystemKind::Gauss: return std::make_unique<GaussStepper>(prec);
    case SystemKind::Ifs: return std::make_unique<IfsStepper>(sys, prec);
    case SystemKind::Rotation: return std::make_unique<RotationStepper>(sys, prec);
  }
  fail(Errc::Internal, "unreachable");
}

CertifiedPoint apply(const SystemSpec& sys, const CertifiedPoint& x) {
  auto st = make_stepper(sys, x.prec_bits);
  CertifiedPoint y = x;
  StepOutcome out = st->step(y);
  if (out.status == StepStatus::Straddle)
    fail(Errc::BranchStraddle, "enclosure straddles a branch boundary");
  if (out.status == StepStatus::DigitOverflow)
    fail(Errc::BranchStraddle, "Gauss digit exceeds the 2^53 cap");
  if (out.status == StepStatus::PrecisionLoss)
    fail(Errc::PrecisionExhausted, "radius grew past the per-step cap");
  return y;
}

OrbitResult orbit(const SystemSpec& sys, const CertifiedPoint& x, long n) {
  OrbitResult res;
  if (n < 0) fail(Errc::InvalidConfig, "orbit length must be >= 0");
  auto st = make_stepper(sys, x.prec_bits);
  CertifiedPoint cur = x;
  for (long k = 1; k <= n; ++k) {
    StepOutcome out = st->step(cur);
    if (out.status != StepStatus::Ok) {
      res.error = out.status;
      res.error_step = int(k);
      return res;
    }
    res.steps.push_back({out.digit, cur});
  }
  return res;
}

long branch_index(const SystemSpec& sys, const CertifiedPoint& x) {
  auto st = make_stepper(sys, x.prec_bits);
  CertifiedPoint y = x;
  StepOutcome out = st->step(y);
  if (out.status != StepStatus::Ok)
    fail(Errc::BranchStraddle, "enclosure straddles a branch boundary");
  return out.digit;
}

}  // namespace twistrec
