#include "twistrec/measures.hpp"

#include <cmath>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

constexpr double kSeriesTailTarget = 1e-18;

Ival qbeta_bracket(const QBeta& v, int prec) {
  CertifiedPoint p = v.approx(prec);
  return {p.lo().to_double(MPFR_RNDD), p.hi().to_double(MPFR_RNDU)};
}

Ival bigfloat_pair(const BigFloat& lo, const BigFloat& hi) {
  return {lo.to_double(MPFR_RNDD), hi.to_double(MPFR_RNDU)};
}

double clip_len_lo(double a, double b, double v) {
  // lower bound of Leb([a,b] cap [0,v]) given v as a lower bound
  double top = std::min(b, v);
  return std::max(0.0, dir_down(top - std::max(a, 0.0)));
}

double clip_len_hi(double a, double b, double v) {
  double top = std::min(b, v);
  return std::max(0.0, dir_up(top - std::max(a, 0.0)));
}

}  // namespace

Measure::Measure(const SystemSpec& sys) : sys_(sys) {
  if (sys.kind == SystemKind::Beta && !sys.beta.is_integer()) {
    double b = sys.beta.approx(64).mid.to_double();
    // K with beta^-K * beta/(beta-1) below the tail target
    double need = (std::log(1.0 / kSeriesTailTarget) + std::log(b / (b - 1.0))) / std::log(b);
    K_ = std::min(8192, int(std::ceil(need)) + 4);
    ParryCoding parry = parry_digits(sys.beta, K_);
    const int wp = 192;
    Ival bpow = Ival::exact(1.0);
    Ival binv;
    {
      CertifiedPoint bb = sys.beta.approx(wp);
      BigFloat ilo(wp), ihi(wp);
      mpfr_ui_div(ilo.raw(), 1, bb.hi().raw(), MPFR_RNDD);
      mpfr_ui_div(ihi.raw(), 1, bb.lo().raw(), MPFR_RNDU);
      binv = bigfloat_pair(ilo, ihi);
    }
    Ival f = Ival::exact(0.0);
    for (int k = 0; k <= K_; ++k) {
      orbit1_.push_back(qbeta_bracket(parry.remainders[size_t(k)], wp));
      beta_pow_.push_back(bpow);
      f = iv_add(f, iv_mul(orbit1_.back(), bpow));
      bpow = iv_mul(bpow, binv);
    }
    tail_ = dir_up(bpow.hi * b / (b - 1.0));
    tail_ok_ = tail_ < 1e-12;
    F_ = iv_add(f, Ival::of(0.0, tail_));
    // sup density <= (1/F_lo) * beta/(beta-1); pad a little
    envelope_ = dir_up((1.0 / F_.lo) * (b / (b - 1.0)) * 1.000001);
  }
  if (sys.kind == SystemKind::Ifs) {
    const int wp = 320;
    Ival c = Ival::exact(0.0);
    for (const auto& m : sys.maps) {
      BigFloat r(wp);
      mpfr_set_q(r.raw(), m.ratio.get_mpq_t(), MPFR_RNDN);
      BigFloat wlo = bf_pow(r, sys.delta_ball.hi(), wp, MPFR_RNDD);
      BigFloat whi = bf_pow(r, sys.delta_ball.lo(), wp, MPFR_RNDU);
      weight_.push_back(bigfloat_pair(wlo, whi));
      c = iv_add(c, weight_.back());
      cum_.push_back(c);
    }
  }
}

Ival Measure::beta_interval(double a, double b) const {
  // (1/F) sum_k beta^-k Leb([a,b] cap [0, v_k]) with a rigorous tail
  Ival acc = Ival::exact(0.0);
  for (int k = 0; k <= K_; ++k) {
    Ival len{clip_len_lo(a, b, orbit1_[size_t(k)].lo),
             clip_len_hi(a, b, orbit1_[size_t(k)].hi)};
    if (len.hi <= 0.0) continue;
    acc = iv_add(acc, iv_mul(len, beta_pow_[size_t(k)]));
  }
  acc = iv_add(acc, Ival::of(0.0, tail_));
  return iv_clamp01(iv_div(acc, F_));
}

Ival Measure::ifs_interval(double a, double b, int depth) const {
  mpq_class qa(a), qb(b);
  Ival low_high = Ival::exact(0.0);
  double extra_hi = 0.0;
  // DFS; only cells meeting the boundary are expanded, so the work is
  // O(branches * depth).
  std::function<void(const mpq_class&, const mpq_class&, const Ival&, int)> rec =
      [&](const mpq_class& rw, const mpq_class& tw, const Ival& mass, int d) {
        mpq_class lo = rw * sys_.hull_lo + tw;
        mpq_class hi = rw * sys_.hull_hi + tw;
        if (hi <= qa || lo >= qb) return;
        if (qa <= lo && hi <= qb) {
          low_high = iv_add(low_high, mass);
          return;
        }
        if (d >= depth) {
          extra_hi = dir_up(extra_hi + mass.hi);
          return;
        }
        for (size_t i = 0; i < sys_.maps.size(); ++i)
          rec(rw * sys_.maps[i].ratio, rw * sys_.maps[i].shift + tw,
              iv_mul(mass, weight_[i]), d + 1);
      };
  rec(mpq_class(1), mpq_class(0), Ival::exact(1.0), 0);
  return iv_clamp01(Ival::of(low_high.lo, dir_up(low_high.hi + extra_hi)));
}

Ival Measure::interval(double a, double b, int ifs_depth) const {
  if (b < a) std::swap(a, b);
  switch (sys_.kind) {
    case SystemKind::Rotation: {
      // Lebesgue on the circle: translation invariant, so only the width
      // matters and windows may wrap.
      double len = std::min(1.0, std::max(0.0, b - a));
      return Ival::of(dir_down(len), dir_up(len));
    }
    case SystemKind::Beta: {
      if (sys_.beta.is_integer()) {
        double lo = std::max(a, 0.0), hi = std::min(b, 1.0);
        double len = std::max(0.0, hi - lo);
        return Ival::of(dir_down(len), dir_up(len));
      }
      return beta_interval(std::max(a, 0.0), std::min(b, 1.0));
    }
    case SystemKind::Gauss: {
      double lo = std::max(a, 0.0), hi = std::min(b, 1.0);
      if (hi <= lo) return Ival::exact(0.0);
      const int wp = 128;
      auto val = [&](mpfr_rnd_t rnd) {
        BigFloat num(1.0 + 0.0, wp), den(wp);
        mpfr_set_d(num.raw(), hi, MPFR_RNDN);
        mpfr_add_ui(num.raw(), num.raw(), 1, rnd);
        mpfr_set_d(den.raw(), lo, MPFR_RNDN);
        mpfr_add_ui(den.raw(), den.raw(), 1,
                    rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU);
        BigFloat q = bf_div(num, den, wp, rnd);
        return bf_log2(q, wp, rnd);
      };
      return iv_clamp01(Ival::of(val(MPFR_RNDD).to_double(MPFR_RNDD),
                                 val(MPFR_RNDU).to_double(MPFR_RNDU)));
    }
    case SystemKind::Ifs: {
      int depth = ifs_depth;
      if (depth <= 0) {
        double r = std::max(1e-12, (b - a) / 2);
        double rmax = sys_.max_contraction();
        depth = int(std::ceil(std::log(r / 10.0) / std::log(rmax)));
        depth = std::max(4, std::min(depth, 200));
      }
      return ifs_interval(a, b, depth);
    }
  }
  fail(Errc::Internal, "unreachable");
}

BallMeasureBracket Measure::ball(double center, double r, int ifs_depth) const {
  if (!(r > 0)) fail(Errc::DegenerateBall, "ball radius must be positive");
  Ival v = interval(center - r, center + r, ifs_depth);
  BallMeasureBracket out;
  out.low = v.lo;
  out.high = v.hi;
  switch (sys_.kind) {
    case SystemKind::Rotation: out.method = BallMeasureBracket::Method::ClosedForm; break;
    case SystemKind::Gauss: out.method = BallMeasureBracket::Method::ClosedForm; break;
    case SystemKind::Ifs: out.method = BallMeasureBracket::Method::CylinderCover; break;
    case SystemKind::Beta:
      out.method = sys_.beta.is_integer() ? BallMeasureBracket::Method::ClosedForm
                                           : BallMeasureBracket::Method::TruncatedSeries;
      break;
  }
  return out;
}

double Measure::density(double x) const {
  switch (sys_.kind) {
    case SystemKind::Rotation:
      return 1.0;  // Lebesgue; trivial case
    case SystemKind::Gauss:
      if (x < 0 || x > 1) fail(Errc::InvalidConfig, "density wants x in [0,1]");
      return 1.0 / (std::log(2.0) * (1.0 + x));
    case SystemKind::Beta: {
      if (sys_.beta.is_integer()) return 1.0;
      Ival h = density_bracket(x, x);
      return h.mid();
    }
    case SystemKind::Ifs:
      fail(Errc::Unsupported, "IFS measure has no density w.r.t. Lebesgue");
  }
  fail(Errc::Internal, "unreachable");
}

Ival Measure::density_bracket(double x_lo, double x_hi) const {
  if (sys_.kind != SystemKind::Beta || sys_.beta.is_integer())
    fail(Errc::Unsupported, "density brackets are for non-integer beta");
  Ival acc = Ival::exact(0.0);
  for (int k = 0; k <= K_; ++k) {
    const Ival& v = orbit1_[size_t(k)];
    if (x_hi < v.lo) {
      acc = iv_add(acc, beta_pow_[size_t(k)]);  // certainly below the step
    } else if (x_lo < v.hi) {
      acc = iv_add(acc, Ival::of(0.0, beta_pow_[size_t(k)].hi));  // straddle
    }
  }
  acc = iv_add(acc, Ival::of(0.0, tail_));
  return iv_div(acc, F_);
}

CertifiedPoint Measure::sample(uint64_t seed, uint64_t index, int prec,
                               uint32_t stream) const {
  switch (sys_.kind) {
    case SystemKind::Rotation:
      return BitTape(seed, stream, index).uniform(prec);
    case SystemKind::Beta:
      if (sys_.beta.is_integer())
        return BitTape(seed, stream, index).uniform(prec);
      return sample_renyi(seed, index, prec, stream);
    case SystemKind::Gauss: {
      CertifiedPoint u = BitTape(seed, stream, index).uniform(prec);
      int p = u.prec_bits;
      BigFloat ylo = bf_exp2(u.lo(), p + 8, MPFR_RNDD);
      mpfr_sub_ui(ylo.raw(), ylo.raw(), 1, MPFR_RNDD);
      BigFloat yhi = bf_exp2(u.hi(), p + 8, MPFR_RNDU);
      mpfr_sub_ui(yhi.raw(), yhi.raw(), 1, MPFR_RNDU);
      if (ylo.sign() < 0) mpfr_set_zero(ylo.raw(), 1);
      return recenter(ylo, yhi, p);
    }
    case SystemKind::Ifs:
      return sample_ifs(seed, index, prec, stream);
  }
  fail(Errc::Internal, "unreachable");
}

CertifiedPoint Measure::sample_renyi(uint64_t seed, uint64_t index, int prec,
                                     uint32_t stream) const {
  if (!tail_ok_)
    fail(Errc::PrecisionExhausted,
         "beta is too close to 1 for certified sampling: the density series "
         "truncation cap leaves a " + std::to_string(tail_) + " tail");
  BitTape tape(seed, stream, index);
  const uint64_t kVOffset = uint64_t(1) << 16;
  for (uint64_t j = 0; j < (uint64_t(1) << 20); ++j) {
    uint64_t off = j * kWordsPerProposal;
    // Certified accept/reject; escalate bits until the comparison resolves.
    for (int bits = 128; bits <= (1 << 15); bits *= 2) {
      CertifiedPoint x = tape.uniform(bits, off);
      CertifiedPoint v = tape.uniform(bits, off + kVOffset);
      Ival h = density_bracket(x.lo().to_double(MPFR_RNDD),
                               x.hi().to_double(MPFR_RNDU));
      double vlo = v.lo().to_double(MPFR_RNDD);
      double vhi = v.hi().to_double(MPFR_RNDU);
      double t_lo = dir_down(vlo * envelope_);
      double t_hi = dir_up(vhi * envelope_);
      if (t_hi < h.lo) {
        // accepted: refine x to the requested precision
        return prec <= bits ? x : tape.uniform(prec, off);
      }
      if (t_lo >= h.hi) break;  // rejected
      if (bits * 2 > (1 << 15))
        fail(Errc::PrecisionExhausted, "rejection test did not resolve");
    }
  }
  fail(Errc::PrecisionExhausted, "rejection sampler starved");
}

CertifiedPoint Measure::sample_ifs(uint64_t seed, uint64_t index, int prec,
                                   uint32_t stream) const {
  BitTape tape(seed, stream, index);
  double rmax = sys_.max_contraction();
  double diam = mpq_class(sys_.hull_hi - sys_.hull_lo).get_d();
  int digits = int(std::ceil((prec + 4 + std::log2(std::max(1.0, diam))) /
                             std::log2(1.0 / rmax))) + 1;
  std::vector<int> word(size_t(digits), 0);
  for (int k = 0; k < digits; ++k) {
    // branch k: word-indexed uniform against the cumulative weight cuts;
    // unresolved draws (u within a double ulp of a cut) are a ~2^-50 event
    // and surface as an error rather than a silent misassignment
    CertifiedPoint u = tape.uniform(128, uint64_t(k) * 16);
    double ulo = u.lo().to_double(MPFR_RNDD);
    double uhi = u.hi().to_double(MPFR_RNDU);
    int branch = -1;
    double prev_hi = 0.0;
    for (size_t i = 0; i < cum_.size(); ++i) {
      if (ulo >= prev_hi && uhi < cum_[i].lo) {
        branch = int(i);
        break;
      }
      prev_hi = cum_[i].hi;
    }
    if (branch < 0)
      fail(Errc::PrecisionExhausted, "IFS digit draw did not resolve");
    word[size_t(k)] = branch;
  }
  // evaluate theta_{w_1} o ... o theta_{w_digits}(hull midpoint ball)
  int wp = prec + 16;
  BigFloat lo(wp), hi(wp);
  mpfr_set_q(lo.raw(), sys_.hull_lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.raw(), sys_.hull_hi.get_mpq_t(), MPFR_RNDU);
  for (int k = digits - 1; k >= 0; --k) {
    const IfsMap& m = sys_.maps[size_t(word[size_t(k)])];
    mpfr_mul_q(lo.raw(), lo.raw(), m.ratio.get_mpq_t(), MPFR_RNDD);
    mpfr_add_q(lo.raw(), lo.raw(), m.shift.get_mpq_t(), MPFR_RNDD);
    mpfr_mul_q(hi.raw(), hi.raw(), m.ratio.get_mpq_t(), MPFR_RNDU);
    mpfr_add_q(hi.raw(), hi.raw(), m.shift.get_mpq_t(), MPFR_RNDU);
  }
  return recenter(lo, hi, prec);
}

}  // namespace twistrec
