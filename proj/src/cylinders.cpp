#include "twistrec/cylinders.hpp"

#include <algorithm>
#include <cmath>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

Ival qbeta_ival(const QBeta& v, int prec) {
  CertifiedPoint p = v.approx(prec);
  return {p.lo().to_double(MPFR_RNDD), p.hi().to_double(MPFR_RNDU)};
}

}  // namespace

long ParryCoding::xi_star(long n) const {
  if (n < 1) fail(Errc::InvalidConfig, "xi* is indexed from 1");
  if (!m_xi) {
    if (n > long(xi.size()))
      fail(Errc::PrecisionExhausted, "xi* requested beyond computed digits");
    return xi[size_t(n - 1)];
  }
  long m = *m_xi;
  long k = n % m;
  if (k == 0) return xi[size_t(m - 1)] - 1;
  return xi[size_t(k - 1)];
}

ParryCoding parry_digits(const BetaNumber& beta, int n) {
  if (n < 1) fail(Errc::InvalidConfig, "parry_digits needs n >= 1");
  if (beta.is_integer())
    fail(Errc::Unsupported,
         "integer beta uses the full shift; ParryCoding is bypassed");
  ParryCoding out;
  out.base = &beta;
  QBeta r = QBeta::one(&beta);
  out.remainders.push_back(r);
  for (int k = 1; k <= n; ++k) {
    QBeta br = r.mul_beta();
    long digit = br.floor();
    r = br.add_int(-digit);
    out.xi.push_back(digit);
    out.remainders.push_back(r);
    if (r.is_zero()) {
      // exact zero remainder: xi_k followed by zeros
      out.m_xi = k;
      for (int j = k + 1; j <= n; ++j) {
        out.xi.push_back(0);
        out.remainders.push_back(r);
      }
      return out;
    }
  }
  // No zero remainder within the budget. For rational and algebraic beta this
  // is exact knowledge of the first n digits; the eventually-zero status
  // beyond them stays open, which only matters for xi* past position n.
  out.zero_status_known = false;
  return out;
}

bool is_admissible(const std::vector<long>& word, const ParryCoding& parry) {
  // Every suffix, extended by zeros, must be lexicographically strictly
  // below xi*.
  long n = long(word.size());
  for (long j = 0; j < n; ++j) {
    bool decided = false;
    for (long k = 1; !decided; ++k) {
      long w = (j + k <= n) ? word[size_t(j + k - 1)] : 0;
      long x = parry.xi_star(k);
      if (w < x) { decided = true; break; }
      if (w > x) return false;
      // equal: continue; beyond the word, zeros must eventually drop below a
      // nonzero xi*, which exists because xi* is never eventually zero.
      if (j + k > n + 4096)
        fail(Errc::PrecisionExhausted, "xi* comparison did not resolve");
    }
  }
  return true;
}

QBeta BetaCylinder::length(const BetaNumber& beta) const {
  QBeta len = image_hi;
  for (int i = 0; i < order; ++i) len = len.mul_inv_beta();
  (void)beta;
  return len;
}

namespace {

// Exact DFS state for beta-cylinders: realized interval [v, v + beta^-m y_hi),
// T^m-image [0, y_hi).
struct BetaState {
  QBeta v;
  QBeta y_hi;
};

// Child state for appending digit d, or nullopt when empty.
std::optional<BetaState> beta_child(const BetaNumber& beta, const BetaState& st,
                                    long d, const QBeta& pw_next) {
  QBeta inv = QBeta::inv_beta(&beta);
  QBeta cut_lo = inv.mul_rat(mpq_class(d));
  if (!(cut_lo.cmp(st.y_hi) < 0)) return std::nullopt;  // needs d/beta < y_hi
  QBeta cut_hi = inv.mul_rat(mpq_class(d + 1));
  QBeta one = QBeta::one(&beta);
  if (one.cmp(cut_hi) < 0) cut_hi = one;
  QBeta upper = st.y_hi.cmp(cut_hi) < 0 ? st.y_hi : cut_hi;
  // new image top: beta * upper - d
  QBeta y = upper.mul_beta().add_int(-d);
  if (y.sign() <= 0) return std::nullopt;
  BetaState child;
  child.v = st.v + pw_next.mul_rat(mpq_class(d));
  child.y_hi = y;
  return child;
}

}  // namespace

BetaCylinder beta_cylinder(const BetaNumber& beta, const std::vector<long>& word) {
  BetaCylinder out;
  out.order = int(word.size());
  BetaState st{QBeta::zero(&beta), QBeta::one(&beta)};
  QBeta pw = QBeta::one(&beta);
  long maxd = beta.is_integer() ? beta.integer_value() - 1 : beta.floor();
  for (long d : word) {
    if (d < 0 || d > maxd) return out;  // outside the digit alphabet: empty
    pw = pw.mul_inv_beta();
    auto child = beta_child(beta, st, d, pw);
    if (!child) return out;
    st = *child;
  }
  out.nonempty = true;
  out.left = st.v;
  out.image_hi = st.y_hi;
  return out;
}

namespace {

struct EnumSink {
  const CylinderOptions* opt;
  const std::function<void(const CylinderEntry&)>* fn;
  long count = 0;
  void emit(const CylinderEntry& e) {
    if (++count > opt->max_count)
      fail(Errc::ExplosionGuard, "cylinder enumeration exceeds max_count");
    (*fn)(e);
  }
};

void enum_beta(const SystemSpec& sys, int m, EnumSink& sink,
               const CylinderOptions& opt) {
  const BetaNumber& beta = sys.beta;
  long maxd = beta.is_integer() ? beta.integer_value() - 1 : beta.floor();
  double kj = std::pow(beta.approx(64).mid.to_double(), double(m));
  std::vector<long> word;
  QBeta one = QBeta::one(&beta);

  // pw[k] = beta^-(k); pw prepared up to m
  std::vector<QBeta> pw;
  pw.push_back(one);
  for (int k = 1; k <= m; ++k) pw.push_back(pw.back().mul_inv_beta());

  std::function<void(const BetaState&, int)> rec = [&](const BetaState& st, int depth) {
    if (depth == m) {
      CylinderEntry e;
      e.word = word;
      QBeta len = st.y_hi;
      for (int i = 0; i < m; ++i) len = len.mul_inv_beta();
      QBeta right = st.v + len;
      e.left = qbeta_ival(st.v, opt.prec);
      e.right = qbeta_ival(right, opt.prec);
      e.length = qbeta_ival(len, opt.prec);
      e.k_j = kj;
      e.is_full = st.y_hi == one;
      e.borderline = false;  // exact arithmetic: fullness is decided
      sink.emit(e);
      return;
    }
    for (long d = 0; d <= maxd; ++d) {
      auto child = beta_child(beta, st, d, pw[size_t(depth + 1)]);
      if (!child) continue;
      word.push_back(d);
      rec(*child, depth + 1);
      word.pop_back();
    }
  };
  BetaState root{QBeta::zero(&beta), one};
  rec(root, 0);
}

void enum_ifs(const SystemSpec& sys, int m, EnumSink& sink,
              const CylinderOptions& opt) {
  (void)opt;
  size_t L = sys.maps.size();
  std::vector<long> word;
  std::function<void(const mpq_class&, const mpq_class&, int)> rec =
      [&](const mpq_class& rw, const mpq_class& tw, int depth) {
        if (depth == m) {
          CylinderEntry e;
          e.word = word;
          mpq_class lo = rw * sys.hull_lo + tw;
          mpq_class hi = rw * sys.hull_hi + tw;
          mpq_class len = hi - lo;
          e.left = Ival::exact(lo.get_d());
          e.right = Ival::exact(hi.get_d());
          e.length = Ival::exact(len.get_d());
          e.k_j = 1.0 / rw.get_d();
          sink.emit(e);
          return;
        }
        for (size_t i = 0; i < L; ++i) {
          // theta_w . theta_i
          mpq_class r2 = rw * sys.maps[i].ratio;
          mpq_class t2 = rw * sys.maps[i].shift + tw;
          word.push_back(long(i));
          rec(r2, t2, depth + 1);
          word.pop_back();
        }
      };
  rec(mpq_class(1), mpq_class(0), 0);
}

void enum_gauss(const SystemSpec& sys, int m, EnumSink& sink,
                const CylinderOptions& opt) {
  (void)sys;
  int cap = opt.gauss_digit_cap;
  double count_estimate = std::pow(double(cap), double(m));
  if (count_estimate > double(opt.max_count))
    fail(Errc::ExplosionGuard, "Gauss enumeration exceeds max_count; lower m or the digit cap");
  std::vector<long> word;
  // convergents: h_n = a_n h_{n-1} + h_{n-2}, same for k
  std::function<void(long, long, long, long, int)> rec =
      [&](long h1, long h0, long k1, long k0, int depth) {
        if (depth == m) {
          // endpoints h1/k1 and (h1+h0)/(k1+k0); length is exactly
          // 1/(k1 (k1+k0)) since consecutive convergents are unimodular
          double a = double(h1) / double(k1);
          double b = double(h1 + h0) / double(k1 + k0);
          if (a > b) std::swap(a, b);
          double len = 1.0 / (double(k1) * double(k1 + k0));
          CylinderEntry e;
          e.word = word;
          e.left = Ival::of(dir_down(a), dir_up(a));
          e.right = Ival::of(dir_down(b), dir_up(b));
          e.length = Ival::of(dir_down(len), dir_up(len));
          e.k_j = double(k1) * double(k1);
          sink.emit(e);
          return;
        }
        for (long d = 1; d <= cap; ++d) {
          word.push_back(d);
          rec(d * h1 + h0, h1, d * k1 + k0, k1, depth + 1);
          word.pop_back();
        }
      };
  rec(0, 1, 1, 0, 0);
}

void enum_rotation(const SystemSpec& sys, int m, EnumSink& sink,
                   const CylinderOptions& opt) {
  // Boundary points {frac(-k alpha) : k = 0..m} split the circle into the
  // order-m cylinders (itineraries are constant between them).
  const int wp = 256;
  CertifiedPoint alpha = sys.rotation_angle(wp);
  std::vector<BigFloat> pts;
  for (int k = 0; k <= m; ++k) {
    BigFloat v(wp);
    mpfr_mul_si(v.raw(), alpha.mid.raw(), -k, MPFR_RNDN);
    mpfr_frac(v.raw(), v.raw(), MPFR_RNDN);
    if (v.sign() < 0) mpfr_add_ui(v.raw(), v.raw(), 1, MPFR_RNDN);
    pts.push_back(std::move(v));
  }
  std::sort(pts.begin(), pts.end(), [](const BigFloat& a, const BigFloat& b) { return a < b; });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const BigFloat& a, const BigFloat& b) { return a == b; }),
            pts.end());
  BigFloat one(1.0, wp);
  for (size_t i = 0; i < pts.size(); ++i) {
    const BigFloat& lo = pts[i];
    const BigFloat& hi = i + 1 < pts.size() ? pts[i + 1] : one;
    if (!(lo < hi)) continue;
    // itinerary of the midpoint
    BigFloat midv = bf_div(bf_add(lo, hi, wp), BigFloat(2.0, 8), wp);
    CertifiedPoint x{midv, rad_zero(), wp};
    OrbitResult orb = orbit(sys, x, m);
    if (orb.error) fail(Errc::PrecisionExhausted, "rotation itinerary straddled");
    CylinderEntry e;
    for (auto& s : orb.steps) e.word.push_back(s.digit);
    e.left = Ival::of(lo.to_double(MPFR_RNDD), lo.to_double(MPFR_RNDU));
    e.right = Ival::of(hi.to_double(MPFR_RNDD), hi.to_double(MPFR_RNDU));
    e.length = Ival::of(dir_down(e.right.lo - e.left.hi), dir_up(e.right.hi - e.left.lo));
    e.k_j = 1.0;
    sink.emit(e);
  }
  (void)opt;
}

}  // namespace

void for_each_cylinder(const SystemSpec& sys, int m, const CylinderOptions& opt,
                       const std::function<void(const CylinderEntry&)>& fn) {
  if (m < 1) fail(Errc::InvalidConfig, "cylinder order must be >= 1");
  EnumSink sink{&opt, &fn};
  switch (sys.kind) {
    case SystemKind::Beta: {
      double bc = double(sys.beta.branch_count());
      if (std::pow(bc, double(m)) > double(opt.max_count) * 8)
        fail(Errc::ExplosionGuard, "beta enumeration exceeds max_count");
      enum_beta(sys, m, sink, opt);
      return;
    }
    case SystemKind::Ifs: {
      if (std::pow(double(sys.maps.size()), double(m)) > double(opt.max_count))
        fail(Errc::ExplosionGuard, "ifs enumeration exceeds max_count");
      enum_ifs(sys, m, sink, opt);
      return;
    }
    case SystemKind::Gauss:
      enum_gauss(sys, m, sink, opt);
      return;
    case SystemKind::Rotation:
      enum_rotation(sys, m, sink, opt);
      return;
  }
}

std::vector<CylinderEntry> cylinders_of_order(const SystemSpec& sys, int m,
                                              const CylinderOptions& opt) {
  std::vector<CylinderEntry> out;
  for_each_cylinder(sys, m, opt, [&](const CylinderEntry& e) { out.push_back(e); });
  return out;
}

std::vector<long> full_subcylinder(const SystemSpec& sys, const std::vector<long>& word) {
  if (sys.kind != SystemKind::Beta)
    fail(Errc::Unsupported, "full cylinders are a beta-expansion notion");
  const BetaNumber& beta = sys.beta;
  BetaCylinder base = beta_cylinder(beta, word);
  if (!base.nonempty) fail(Errc::InvalidConfig, "empty cylinder has no subcylinder");
  QBeta one = QBeta::one(&beta);
  if (base.image_hi == one) return word;  // already full
  // Appending digit 0 multiplies the image top by beta (capped at 1); the
  // image reaches [0,1) within ceil(log_beta(1/y_hi)) appends, and the
  // resulting full cylinder keeps at least Leb(J)/beta.
  std::vector<long> ext = word;
  QBeta y = base.image_hi;
  for (int guard = 0; guard < 100000; ++guard) {
    ext.push_back(0);
    QBeta ynext = y.mul_beta();
    if (ynext.cmp(one) >= 0) return ext;
    y = ynext;
  }
  fail(Errc::Internal, "full subcylinder search did not terminate");
}

double gauss_tail_mass(int m, int cap) {
  // Leb{some digit among the first m exceeds cap} <= m * 2 * Leb(a_1 > cap).
  return double(m) * 2.0 / double(cap + 1);
}

double kj_sum(const SystemSpec& sys, int m, const CylinderOptions& opt) {
  switch (sys.kind) {
    case SystemKind::Beta: {
      long count = 0;
      for_each_cylinder(sys, m, opt, [&](const CylinderEntry&) { ++count; });
      const int wp = 128;
      BigFloat b = sys.beta.approx(wp).mid;
      BigFloat term = bf_pow_si(b, -m, wp);
      mpfr_mul_si(term.raw(), term.raw(), count, MPFR_RNDN);
      return term.to_double();
    }
    case SystemKind::Ifs: {
      // (sum_i r_i^delta)^m, evaluated from the delta enclosure
      Ival total = Ival::exact(0.0);
      for (const auto& mp : sys.maps) {
        const int wp = 320;
        BigFloat r(wp);
        mpfr_set_q(r.raw(), mp.ratio.get_mpq_t(), MPFR_RNDN);
        BigFloat tlo = bf_pow(r, sys.delta_ball.hi(), wp, MPFR_RNDD);
        BigFloat thi = bf_pow(r, sys.delta_ball.lo(), wp, MPFR_RNDU);
        total = iv_add(total, Ival::of(tlo.to_double(MPFR_RNDD), thi.to_double(MPFR_RNDU)));
      }
      double lo = std::pow(total.lo, double(m));
      double hi = std::pow(total.hi, double(m));
      return 0.5 * (lo + hi);
    }
    case SystemKind::Gauss: {
      double sum = 0.0;
      double delta = sys.delta;
      for_each_cylinder(sys, m, opt, [&](const CylinderEntry& e) {
        sum += std::pow(e.k_j, -delta);
      });
      return sum + gauss_tail_mass(m, opt.gauss_digit_cap);
    }
    case SystemKind::Rotation: {
      long count = 0;
      for_each_cylinder(sys, m, opt, [&](const CylinderEntry&) { ++count; });
      return double(count);  // K_J = 1 identically
    }
  }
  fail(Errc::Internal, "unreachable");
}

double min_kj(const SystemSpec& sys, int m) {
  switch (sys.kind) {
    case SystemKind::Beta:
      return std::pow(sys.beta.approx(64).mid.to_double(), double(m));
    case SystemKind::Ifs:
      return std::pow(1.0 / sys.max_contraction(), double(m));
    case SystemKind::Gauss: {
      // all-ones word: q_m are Fibonacci numbers, K_J = q_m^2
      double q1 = 1, q0 = 0;
      for (int i = 0; i < m; ++i) {
        double q = q1 + q0;
        q0 = q1;
        q1 = q;
      }
      return q1 * q1;
    }
    case SystemKind::Rotation:
      return 1.0;  // isometry: the expanding property fails
  }
  fail(Errc::Internal, "unreachable");
}

}  // namespace twistrec
