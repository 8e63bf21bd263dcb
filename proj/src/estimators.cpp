#include "twistrec/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "twistrec/cylinders.hpp"
#include "twistrec/errors.hpp"
#include "twistrec/runner.hpp"

namespace twistrec {

namespace {

// One pass over the orbit at a fixed working precision. Returns false when a
// branch straddle / precision loss makes the pass unusable.
bool orbit_pass(const SystemSpec& sys, const TwistSpec& f,
                const CertifiedPoint& x0, const std::vector<long>& test_ns,
                const std::vector<PsiBracket>& pbs,
                std::vector<HitState>& states) {
  CertifiedPoint fx(BigFloat(8), rad_zero(), 8);
  try {
    fx = eval_twist(f, x0);
  } catch (const Error&) {
    return false;  // piece straddle: escalate
  }
  auto stepper = make_stepper(sys, x0.prec_bits);
  CertifiedPoint cur = x0;
  size_t ti = 0;
  bool circle = sys.kind == SystemKind::Rotation;
  long N = test_ns.back();
  for (long n = 1; n <= N && ti < test_ns.size(); ++n) {
    StepOutcome out = stepper->step(cur);
    if (out.status != StepStatus::Ok) return false;
    if (n == test_ns[ti]) {
      DistBracket d = circle ? circle_distance(cur, fx) : distance(cur, fx);
      const PsiBracket& pb = pbs[ti];
      if (d.hi.cmp(pb.lo) < 0)
        states[ti] = HitState::Hit;
      else if (d.lo.cmp(pb.hi) >= 0)
        states[ti] = HitState::Miss;
      else
        states[ti] = HitState::Indeterminate;
      ++ti;
    }
  }
  return true;
}

std::vector<PsiBracket> all_brackets(const PsiSpec& psi,
                                     const std::vector<long>& test_ns) {
  std::vector<PsiBracket> pbs;
  pbs.reserve(test_ns.size());
  for (long n : test_ns) pbs.push_back(psi_bracket(psi, n));
  return pbs;
}

bool profile_with(const Measure& mu, const TwistSpec& f,
                  const std::vector<long>& test_ns,
                  const std::vector<PsiBracket>& pbs, uint64_t seed,
                  uint64_t index, uint32_t stream, int max_prec,
                  std::vector<HitState>& states, int min_prec = 0) {
  const SystemSpec& sys = mu.system();
  long N = test_ns.back();
  std::fill(states.begin(), states.end(), HitState::Indeterminate);
  int start = std::max(required_precision(sys, N), min_prec);
  for (int prec = start; prec <= max_prec; prec *= 2) {
    CertifiedPoint x = mu.sample(seed, index, prec, stream);
    std::fill(states.begin(), states.end(), HitState::Indeterminate);
    if (orbit_pass(sys, f, x, test_ns, pbs, states)) {
      bool indet = false;
      for (HitState s : states)
        if (s == HitState::Indeterminate) { indet = true; break; }
      if (!indet) return true;
    }
  }
  return false;
}

MeasureEstimate make_estimate(long hits, long indets, long n, uint64_t seed,
                              double z) {
  MeasureEstimate est;
  est.n_samples = n;
  est.seed = seed;
  est.indeterminate_count = indets;
  est.mean = double(hits) / double(n);
  // Indeterminates are folded into the CI endpoints as worst case both ways,
  // never into the mean.
  WilsonCI lo_ci = wilson(hits, n, z);
  WilsonCI hi_ci = wilson(hits + indets, n, z);
  est.stderr_ = lo_ci.stderr_;
  est.ci_low = lo_ci.lo;
  est.ci_high = hi_ci.hi;
  return est;
}

}  // namespace

HitState hit_test(const SystemSpec& sys, const TwistSpec& f, const PsiSpec& psi,
                  const CertifiedPoint& x, long n, int max_prec) {
  if (n < 1) fail(Errc::InvalidConfig, "hit_test needs n >= 1");
  std::vector<long> ns{n};
  std::vector<PsiBracket> pbs = all_brackets(psi, ns);
  std::vector<HitState> states{HitState::Indeterminate};
  int prec = std::max(required_precision(sys, n), x.prec_bits);
  for (; prec <= max_prec; prec *= 2) {
    // pad the given enclosure to the working precision (its radius stays)
    CertifiedPoint xp{BigFloat(prec), x.rad, prec};
    mpfr_set(xp.mid.raw(), x.mid.raw(), MPFR_RNDN);
    states[0] = HitState::Indeterminate;
    if (orbit_pass(sys, f, xp, ns, pbs, states) &&
        states[0] != HitState::Indeterminate)
      return states[0];
  }
  return HitState::Indeterminate;
}

std::vector<HitState> profile_point(const Measure& mu, const TwistSpec& f,
                                    const PsiSpec& psi,
                                    const std::vector<long>& test_ns,
                                    uint64_t seed, uint64_t index,
                                    uint32_t stream, int max_prec) {
  std::vector<PsiBracket> pbs = all_brackets(psi, test_ns);
  std::vector<HitState> states(test_ns.size(), HitState::Indeterminate);
  profile_with(mu, f, test_ns, pbs, seed, index, stream, max_prec, states);
  return states;  // residual indeterminates reported as such
}

MeasureEstimate estimate_mu_An(const SystemSpec& sys, const TwistSpec& f,
                               const PsiSpec& psi, long n, const RunConfig& rc) {
  if (rc.samples < 100) fail(Errc::InvalidConfig, "estimate_mu_An needs samples >= 100");
  Measure mu(sys);
  std::vector<long> ns{n};
  std::vector<PsiBracket> pbs = all_brackets(psi, ns);
  std::vector<long> chunk_hits(64, 0), chunk_indets(64, 0);
  parallel_chunks(rc.samples, rc.threads, [&](long lo, long hi, int chunk) {
    long h = 0, ind = 0;
    std::vector<HitState> st(1);
    for (long i = lo; i < hi; ++i) {
      profile_with(mu, f, ns, pbs, rc.seed, uint64_t(i), rc.stream,
                   rc.max_precision, st, rc.min_precision);
      if (st[0] == HitState::Hit) ++h;
      if (st[0] == HitState::Indeterminate) ++ind;
    }
    chunk_hits[size_t(chunk)] = h;
    chunk_indets[size_t(chunk)] = ind;
  });
  long hits = 0, indets = 0;
  for (long v : chunk_hits) hits += v;
  for (long v : chunk_indets) indets += v;
  if (double(indets) > rc.indeterminate_budget * double(rc.samples))
    fail(Errc::IndeterminateExcess, "indeterminate rate above budget");
  return make_estimate(hits, indets, rc.samples, rc.seed, rc.confidence_z);
}

MixingRate mixing_rate(const SystemSpec& sys, long n, double user_a_n,
                       const std::string& user_label) {
  if (user_a_n >= 0) return {user_a_n, user_label};
  if (sys.kind == SystemKind::Ifs) {
    double rmax = sys.max_contraction();
    return {4.0 * std::pow(rmax, double(n) * sys.delta), "closed_form_ifs"};
  }
  if (sys.kind == SystemKind::Beta && sys.beta.is_integer()) {
    // the partial-cylinder argument with exact dyadic independence
    double b = double(sys.beta.integer_value());
    return {4.0 * std::pow(b, -double(n)), "closed_form_beta_int"};
  }
  fail(Errc::InvalidConfig,
       "no closed-form a_n for this system; pass one explicitly or use the "
       "conditions module estimate");
}

QuasiIndependenceReport estimate_pairwise(const SystemSpec& sys, const TwistSpec& f,
                                          const PsiSpec& psi, long m, long n,
                                          const RunConfig& rc, double user_a_n,
                                          const std::string& a_label) {
  if (!(n > m && m >= 1)) fail(Errc::InvalidConfig, "pairwise needs n > m >= 1");
  if (rc.samples < 100) fail(Errc::InvalidConfig, "pairwise needs samples >= 100");
  Measure mu(sys);
  std::vector<long> ns{m, n};
  std::vector<PsiBracket> pbs = all_brackets(psi, ns);
  // same sample stream for marginals and joint (common random numbers)
  std::vector<std::array<long, 5>> acc(64, {0, 0, 0, 0, 0});
  parallel_chunks(rc.samples, rc.threads, [&](long lo, long hi, int chunk) {
    std::array<long, 5> a{0, 0, 0, 0, 0};  // hit_m, hit_n, joint, indet_any, joint_hi
    std::vector<HitState> st(2);
    for (long i = lo; i < hi; ++i) {
      profile_with(mu, f, ns, pbs, rc.seed, uint64_t(i), rc.stream,
                   rc.max_precision, st, rc.min_precision);
      bool im = st[0] == HitState::Indeterminate;
      bool in = st[1] == HitState::Indeterminate;
      if (st[0] == HitState::Hit) ++a[0];
      if (st[1] == HitState::Hit) ++a[1];
      if (st[0] == HitState::Hit && st[1] == HitState::Hit) ++a[2];
      if (im || in) ++a[3];
      // worst-case joint: hit-or-indeterminate on both coordinates
      if (st[0] != HitState::Miss && st[1] != HitState::Miss) ++a[4];
    }
    acc[size_t(chunk)] = a;
  });
  long hm = 0, hn = 0, joint = 0, indet = 0, joint_hi = 0;
  for (auto& a : acc) {
    hm += a[0];
    hn += a[1];
    joint += a[2];
    indet += a[3];
    joint_hi += a[4];
  }
  if (double(indet) > rc.indeterminate_budget * double(rc.samples))
    fail(Errc::IndeterminateExcess, "indeterminate rate above budget");
  QuasiIndependenceReport rep;
  rep.m = m;
  rep.n = n;
  rep.marg_m = make_estimate(hm, indet, rc.samples, rc.seed, rc.confidence_z);
  rep.marg_n = make_estimate(hn, indet, rc.samples, rc.seed, rc.confidence_z);
  rep.est_joint = make_estimate(joint, joint_hi - joint, rc.samples, rc.seed,
                                rc.confidence_z);
  MixingRate anm = mixing_rate(sys, n - m, user_a_n, a_label);
  MixingRate an = mixing_rate(sys, n, user_a_n, a_label);
  rep.a_source = anm.source;
  double d = sys.delta;
  double pm = std::pow(psi_eval(psi, m), d);
  double pn = std::pow(psi_eval(psi, n), d);
  rep.bound_value = pm * pn + anm.value * pn + an.value * pm;
  if (rep.bound_value <= 0) fail(Errc::ZeroDenominator, "degenerate pairwise bound");
  rep.ratio = rep.est_joint.mean / rep.bound_value;
  return rep;
}

PairwiseGrid pairwise_grid(const SystemSpec& sys, const TwistSpec& f,
                           const PsiSpec& psi, long m_lo, long m_hi,
                           const RunConfig& rc, double user_a_n,
                           const std::string& a_label) {
  if (!(1 <= m_lo && m_lo < m_hi)) fail(Errc::InvalidConfig, "grid needs 1 <= m_lo < m_hi");
  if (rc.samples < 100) fail(Errc::InvalidConfig, "pairwise grid needs samples >= 100");
  Measure mu(sys);
  long K = m_hi - m_lo + 1;
  std::vector<long> ns(size_t(K), 0);
  for (long k = 0; k < K; ++k) ns[size_t(k)] = m_lo + k;
  std::vector<PsiBracket> pbs = all_brackets(psi, ns);
  size_t npairs = size_t(K * (K - 1) / 2);
  auto pair_index = [K](long i, long j) {
    return size_t(i * (2 * K - i - 1) / 2 + (j - i - 1));
  };
  struct Local {
    std::vector<long> marg, joint;
    long indet = 0;
  };
  std::vector<Local> locals(64);
  for (auto& l : locals) {
    l.marg.assign(size_t(K), 0);
    l.joint.assign(npairs, 0);
  }
  parallel_chunks(rc.samples, rc.threads, [&](long lo, long hi, int chunk) {
    Local& l = locals[size_t(chunk)];
    std::vector<HitState> st(size_t(K), HitState::Indeterminate);
    std::vector<long> hit_idx;
    for (long i = lo; i < hi; ++i) {
      profile_with(mu, f, ns, pbs, rc.seed, uint64_t(i), rc.stream,
                   rc.max_precision, st, rc.min_precision);
      hit_idx.clear();
      bool indet = false;
      for (long k = 0; k < K; ++k) {
        if (st[size_t(k)] == HitState::Hit) {
          ++l.marg[size_t(k)];
          hit_idx.push_back(k);
        } else if (st[size_t(k)] == HitState::Indeterminate) {
          indet = true;
        }
      }
      if (indet) ++l.indet;
      for (size_t a = 0; a < hit_idx.size(); ++a)
        for (size_t b = a + 1; b < hit_idx.size(); ++b)
          ++l.joint[pair_index(hit_idx[a], hit_idx[b])];
    }
  });
  std::vector<long> marg(size_t(K), 0), joint(npairs, 0);
  long indet = 0;
  for (const auto& l : locals) {
    for (long k = 0; k < K; ++k) marg[size_t(k)] += l.marg[size_t(k)];
    for (size_t p = 0; p < npairs; ++p) joint[p] += l.joint[p];
    indet += l.indet;
  }
  if (double(indet) > rc.indeterminate_budget * double(rc.samples))
    fail(Errc::IndeterminateExcess, "indeterminate rate above budget");
  PairwiseGrid grid;
  grid.m_lo = m_lo;
  grid.m_hi = m_hi;
  grid.samples = rc.samples;
  grid.seed = rc.seed;
  grid.indeterminate_points = indet;
  double d = sys.delta;
  for (long i = 0; i < K; ++i) {
    for (long j = i + 1; j < K; ++j) {
      QuasiIndependenceReport rep;
      rep.m = m_lo + i;
      rep.n = m_lo + j;
      rep.marg_m = make_estimate(marg[size_t(i)], indet, rc.samples, rc.seed, rc.confidence_z);
      rep.marg_n = make_estimate(marg[size_t(j)], indet, rc.samples, rc.seed, rc.confidence_z);
      rep.est_joint = make_estimate(joint[pair_index(i, j)], indet, rc.samples,
                                    rc.seed, rc.confidence_z);
      MixingRate anm = mixing_rate(sys, rep.n - rep.m, user_a_n, a_label);
      MixingRate an = mixing_rate(sys, rep.n, user_a_n, a_label);
      rep.a_source = anm.source;
      double pm = std::pow(psi_eval(psi, rep.m), d);
      double pn = std::pow(psi_eval(psi, rep.n), d);
      rep.bound_value = pm * pn + anm.value * pn + an.value * pm;
      rep.ratio = rep.est_joint.mean / rep.bound_value;
      grid.reports.push_back(std::move(rep));
    }
  }
  return grid;
}

HitStatistics hit_statistics(const SystemSpec& sys, const TwistSpec& f,
                             const PsiSpec& psi, long N, const RunConfig& rc,
                             bool keep_records) {
  if (N < 2) fail(Errc::InvalidConfig, "hit_statistics needs N >= 2");
  Measure mu(sys);
  std::vector<long> ns(size_t(N), 0);
  for (long k = 1; k <= N; ++k) ns[size_t(k - 1)] = k;
  HitStatistics out;
  out.horizon = N;
  out.samples = rc.samples;
  out.records.resize(size_t(rc.samples));
  std::vector<PsiBracket> pbs = all_brackets(psi, ns);
  std::vector<std::vector<long>> chunk_hits(64, std::vector<long>(size_t(N), 0));
  std::vector<std::vector<long>> chunk_indets(64, std::vector<long>(size_t(N), 0));
  std::vector<long> chunk_tail(64, 0);
  parallel_chunks(rc.samples, rc.threads, [&](long lo, long hi, int chunk) {
    auto& h = chunk_hits[size_t(chunk)];
    auto& ind = chunk_indets[size_t(chunk)];
    std::vector<HitState> st(size_t(N), HitState::Indeterminate);
    for (long i = lo; i < hi; ++i) {
      profile_with(mu, f, ns, pbs, rc.seed, uint64_t(i), rc.stream,
                   rc.max_precision, st, rc.min_precision);
      HitRecord rec;
      rec.point_index = i;
      rec.horizon = N;
      bool tail_hit = false;
      for (long k = 1; k <= N; ++k) {
        HitState s = st[size_t(k - 1)];
        if (s == HitState::Hit) {
          rec.hit_times.push_back(k);
          ++h[size_t(k - 1)];
          if (2 * k > N) tail_hit = true;
        } else if (s == HitState::Indeterminate) {
          rec.indeterminate_times.push_back(k);
          ++ind[size_t(k - 1)];
        }
      }
      if (tail_hit) ++chunk_tail[size_t(chunk)];
      if (keep_records) out.records[size_t(i)] = std::move(rec);
    }
  });
  out.hit_counts.assign(size_t(N), 0);
  out.indet_counts.assign(size_t(N), 0);
  long tail_points = 0;
  for (int c = 0; c < 64; ++c) {
    for (long k = 0; k < N; ++k) {
      out.hit_counts[size_t(k)] += chunk_hits[size_t(c)][size_t(k)];
      out.indet_counts[size_t(k)] += chunk_indets[size_t(c)][size_t(k)];
    }
    tail_points += chunk_tail[size_t(c)];
  }
  if (!keep_records) out.records.clear();
  out.mu_hat.resize(size_t(N));
  double total = 0;
  for (long k = 0; k < N; ++k) {
    out.mu_hat[size_t(k)] = double(out.hit_counts[size_t(k)]) / double(rc.samples);
    total += out.mu_hat[size_t(k)];
    out.indeterminate_total += out.indet_counts[size_t(k)];
  }
  out.mean_sn = total;
  out.tail_fraction = double(tail_points) / double(rc.samples);
  return out;
}

VerdictReport verdict(const SystemSpec& sys, const TwistSpec& f, const PsiSpec& psi,
                      long N, const RunConfig& rc, double theta_full,
                      double theta_null) {
  if (!psi.vanishes())
    fail(Errc::InvalidConfig,
         "verdict requires psi(n) -> 0 (the zero-one law's vanishing "
         "hypothesis); a constant psi family is rejected");
  VerdictReport rep;
  rep.series = series_class(psi, sys.delta);
  rep.theta_full = theta_full;
  rep.theta_null = theta_null;
  rep.horizon = N;
  rep.samples = rc.samples;
  rep.sum_psi_delta = series_partial(psi, sys.delta, N);
  HitStatistics hs = hit_statistics(sys, f, psi, N, rc, /*keep_records=*/false);
  rep.tail_fraction = hs.tail_fraction;
  rep.sum_mu_hat = hs.mean_sn;
  // Applicability: the zero-one dichotomy needs min K_J to grow.
  rep.conditions_applicable = min_kj(sys, 8) > min_kj(sys, 1);
  if (!rep.conditions_applicable) {
    rep.flags.push_back(
        "expanding/mixing conditions fail for this system; the series "
        "dichotomy is not applicable");
    if (rep.tail_fraction >= theta_full)
      rep.verdict = "empirically_full";
    else if (rep.tail_fraction <= theta_null)
      rep.verdict = "empirically_null";
    else
      rep.verdict = "inconclusive";
    return rep;
  }
  if (rep.series == SeriesClass::Divergent && rep.tail_fraction >= theta_full)
    rep.verdict = "empirically_full";
  else if (rep.series == SeriesClass::Convergent && rep.tail_fraction <= theta_null)
    rep.verdict = "empirically_null";
  else
    rep.verdict = "inconclusive";
  if (psi.family == PsiSpec::Family::Table && !psi.monotone)
    rep.flags.push_back("table psi is not monotone; some cited results assume monotonicity");
  return rep;
}

double chung_erdos_bound(const std::vector<double>& mu_vec,
                         const std::vector<std::vector<double>>& joint) {
  size_t N = mu_vec.size();
  if (joint.size() != N) fail(Errc::InvalidConfig, "joint matrix shape mismatch");
  for (size_t i = 0; i < N; ++i) {
    if (joint[i].size() != N) fail(Errc::InvalidConfig, "joint matrix shape mismatch");
    if (std::fabs(joint[i][i] - mu_vec[i]) > 1e-12)
      fail(Errc::InvalidConfig, "joint diagonal must equal mu_vec");
    for (size_t j = 0; j < i; ++j)
      if (std::fabs(joint[i][j] - joint[j][i]) > 1e-12)
        fail(Errc::InvalidConfig, "joint matrix must be symmetric");
  }
  double best = 0.0;
  bool any = false;
  double num_sum = 0.0;
  for (size_t n = 0; n < N; ++n) {
    num_sum += mu_vec[n];
    double den = 0.0;
    for (size_t i = 0; i <= n; ++i)
      for (size_t j = 0; j <= n; ++j) den += joint[i][j];
    if (den > 0) {
      any = true;
      best = std::max(best, num_sum * num_sum / den);
    }
  }
  if (!any) fail(Errc::ZeroDenominator, "all pairwise measures are zero");
  return best;
}

double posmeas_bound(double s1, double s2) {
  if (!(s1 > 0) || !(s2 > 0))
    fail(Errc::InvalidConfig, "posmeas_bound needs positive inputs");
  return s1 * s1 / (2.0 * s2);
}

double lemma42_radius(const SystemSpec& sys, const PsiSpec& psi, long m, double p) {
  double kj = min_kj(sys, int(m));
  if (kj <= p) fail(Errc::InvalidConfig, "radius defined only once K_J exceeds p");
  return 2.0 * psi_eval(psi, m) / (kj - p);
}

}  // namespace twistrec
