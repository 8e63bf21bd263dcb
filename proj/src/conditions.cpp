#include "twistrec/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "twistrec/cylinders.hpp"
#include "twistrec/errors.hpp"
#include "twistrec/rng.hpp"
#include "twistrec/runner.hpp"

namespace twistrec {

namespace {

double hull_lo_d(const SystemSpec& sys) {
  return sys.kind == SystemKind::Ifs ? sys.hull_lo.get_d() : 0.0;
}
double hull_hi_d(const SystemSpec& sys) {
  return sys.kind == SystemKind::Ifs ? sys.hull_hi.get_d() : 1.0;
}

}  // namespace

AhlforsReport check_ahlfors(const SystemSpec& sys, int centers, int radii,
                            uint64_t seed) {
  if (centers < 2 || radii < 2) fail(Errc::InvalidConfig, "ahlfors grid too small");
  Measure mu(sys);
  double lo = hull_lo_d(sys), hi = hull_hi_d(sys);
  double diam = hi - lo;
  AhlforsReport rep;
  rep.r0 = diam / 10.0;
  rep.centers = centers;
  rep.radii = radii;
  std::vector<double> cs;
  if (sys.kind == SystemKind::Ifs) {
    // centers sampled from mu, plus the hull endpoints
    for (int i = 0; i < centers - 2; ++i)
      cs.push_back(mu.sample(seed, uint64_t(i), 96, /*stream=*/11).mid.to_double());
    cs.push_back(lo);
    cs.push_back(hi);
  } else {
    for (int i = 0; i < centers; ++i)
      cs.push_back(lo + diam * double(i) / double(centers - 1));
  }
  // three radius decades below r0
  std::vector<double> rs;
  for (int j = 0; j < radii; ++j)
    rs.push_back(rep.r0 * std::pow(10.0, -3.0 * double(j) / double(radii - 1)));
  double eta1 = 1e300, eta2 = 0.0;
  for (double x : cs) {
    for (double r : rs) {
      double wlo = std::max(lo, x - r), whi = std::min(hi, x + r);
      if (sys.kind == SystemKind::Rotation) {
        wlo = x - r;
        whi = x + r;  // circle: no clipping
      }
      double wlen = whi - wlo;
      if (wlen <= 0) continue;
      Ival m = mu.interval(wlo, whi);
      double denom = std::pow(wlen, sys.delta);
      eta1 = std::min(eta1, m.lo / denom);  // inner bracket for eta1
      eta2 = std::max(eta2, m.hi / denom);  // outer bracket for eta2
    }
  }
  rep.eta1 = eta1;
  rep.eta2 = eta2;
  return rep;
}

namespace {

// Leb(E cap T^-n F) for the x -> b x mod 1 map with integer b, exact sweep.
double sweep_integer_beta(long b, long n, double a1, double a2, double c, double d) {
  double S = std::pow(double(b), double(n));
  double len = d - c;
  auto G = [&](double t) {
    double fl = std::floor(t);
    return fl * len + std::min(std::max(t - fl - c, 0.0), len);
  };
  return (G(S * a2) - G(S * a1)) / S;
}

// arc overlap on the circle: Leb([a,b) cap ([c,d) + shift mod 1))
double arc_overlap(double a, double b, double c, double d, double shift) {
  double lo = c + shift, hi = d + shift;
  lo -= std::floor(lo);
  hi = lo + (d - c);
  double total = 0.0;
  auto seg = [&](double u, double v) {
    double x = std::max(a, u), y = std::min(b, v);
    if (y > x) total += y - x;
  };
  if (hi <= 1.0) {
    seg(lo, hi);
  } else {
    seg(lo, 1.0);
    seg(0.0, hi - 1.0);
  }
  return total;
}

struct GridIntervals {
  std::vector<std::pair<double, double>> es, fs;
};

GridIntervals mixing_grid(const SystemSpec& sys, int grid) {
  GridIntervals g;
  double lo = hull_lo_d(sys), hi = hull_hi_d(sys), diam = hi - lo;
  for (int i = 0; i < grid; ++i) {
    double c = lo + diam * (0.17 + 0.61 * double(i) / double(std::max(1, grid - 1)));
    double r = diam * (0.04 + 0.05 * double(i % 3));
    g.es.push_back({std::max(lo, c - r), std::min(hi, c + r)});
    double c2 = lo + diam * (0.23 + 0.55 * double(i) / double(std::max(1, grid - 1)));
    double r2 = diam * (0.03 + 0.06 * double((i + 1) % 3));
    g.fs.push_back({std::max(lo, c2 - r2), std::min(hi, c2 + r2)});
  }
  // a dyadic-aligned pair as well
  g.es.push_back({lo + diam * 0.25, lo + diam * 0.5});
  g.fs.push_back({lo + diam * 0.5, lo + diam * 0.75});
  return g;
}

// IFS: exact cylinder algebra. mu(J cap T^-n F) = mu(J) mu(F) for every
// order-n cylinder, so only the <= 2 boundary cylinders of E contribute.
Ival mixing_diff_ifs(const SystemSpec& sys, const Measure& mu, double a, double b,
                     long n, double c, double d) {
  mpq_class qa(a), qb(b);
  Ival inner = Ival::exact(0.0), boundary = Ival::exact(0.0);
  const int wp = 320;
  std::vector<Ival> weight;
  for (const auto& m : sys.maps) {
    BigFloat r(wp);
    mpfr_set_q(r.raw(), m.ratio.get_mpq_t(), MPFR_RNDN);
    BigFloat wl = bf_pow(r, sys.delta_ball.hi(), wp, MPFR_RNDD);
    BigFloat wh = bf_pow(r, sys.delta_ball.lo(), wp, MPFR_RNDU);
    weight.push_back({wl.to_double(MPFR_RNDD), wh.to_double(MPFR_RNDU)});
  }
  std::function<void(const mpq_class&, const mpq_class&, const Ival&, int)> rec =
      [&](const mpq_class& rw, const mpq_class& tw, const Ival& mass, int depth) {
        mpq_class clo = rw * sys.hull_lo + tw;
        mpq_class chi = rw * sys.hull_hi + tw;
        if (chi <= qa || clo >= qb) return;
        if (qa <= clo && chi <= qb) {
          inner = iv_add(inner, mass);
          return;
        }
        if (depth >= int(n)) {
          boundary = iv_add(boundary, mass);
          return;
        }
        for (size_t i = 0; i < sys.maps.size(); ++i)
          rec(rw * sys.maps[i].ratio, rw * sys.maps[i].shift + tw,
              iv_mul(mass, weight[i]), depth + 1);
      };
  rec(mpq_class(1), mpq_class(0), Ival::exact(1.0), 0);
  // deep cover: the muF bracket width must sit far below the 2^-n signal
  Ival muF = mu.interval(c, d, /*ifs_depth=*/60);
  Ival muE = iv_add(inner, Ival::of(0.0, boundary.hi));
  // mu(E cap T^-n F) = inner * mu(F) + boundary part in [0, boundary * muF.hi]
  Ival inter = iv_add(iv_mul(inner, muF), Ival::of(0.0, dir_up(boundary.hi * muF.hi)));
  return iv_abs_sub(inter, iv_mul(muE, muF));
}

// Monte Carlo membership estimate of mu(E cap T^-n F).
double mixing_mc(const SystemSpec& sys, const Measure& mu, double a, double b,
                 long n, double c, double d, long samples, uint64_t seed,
                 int threads) {
  std::vector<long> counts(64, 0);
  parallel_chunks(samples, threads, [&](long lo_i, long hi_i, int chunk) {
    long cnt = 0;
    for (long i = lo_i; i < hi_i; ++i) {
      int prec = required_precision(sys, n) * 2;
      CertifiedPoint x = mu.sample(seed, uint64_t(i), prec, /*stream=*/12);
      double xv = x.mid.to_double();
      if (xv < a || xv >= b) continue;
      auto stepper = make_stepper(sys, x.prec_bits);
      CertifiedPoint cur = x;
      bool ok = true;
      for (long k = 0; k < n && ok; ++k) ok = stepper->step(cur).status == StepStatus::Ok;
      if (!ok) continue;
      double yv = cur.mid.to_double();
      if (yv >= c && yv < d) ++cnt;
    }
    counts[size_t(chunk)] = cnt;
  });
  long total = 0;
  for (long v : counts) total += v;
  return double(total) / double(samples);
}

}  // namespace

MixingEstimate estimate_mixing(const SystemSpec& sys, long n, int grid,
                               long mc_samples, uint64_t seed, int threads) {
  if (n < 1) fail(Errc::InvalidConfig, "mixing estimate needs n >= 1");
  Measure mu(sys);
  GridIntervals g = mixing_grid(sys, grid);
  double best = 0.0;
  MixingEstimate out;
  out.n = n;
  switch (sys.kind) {
    case SystemKind::Beta: {
      if (sys.beta.is_integer()) {
        long b = sys.beta.integer_value();
        if (double(n) * std::log2(double(b)) > 50) {
          out.value = 0.0;  // below exact-sweep resolution
          out.method = "exact_sweep";
          return out;
        }
        for (auto& e : g.es)
          for (auto& f : g.fs) {
            double inter = sweep_integer_beta(b, n, e.first, e.second, f.first, f.second);
            double lf = f.second - f.first;
            double diff = std::fabs(inter - (e.second - e.first) * lf) / lf;
            best = std::max(best, diff);
          }
        out.value = best;
        out.method = "exact_sweep";
        return out;
      }
      // non-integer beta: Monte Carlo against bracketed mu(E), mu(F)
      for (auto& e : g.es)
        for (auto& f : g.fs) {
          double inter = mixing_mc(sys, mu, e.first, e.second, n, f.first, f.second,
                                   mc_samples, seed, threads);
          double me = mu.interval(e.first, e.second).mid();
          double mf = mu.interval(f.first, f.second).mid();
          best = std::max(best, std::fabs(inter - me * mf) / mf);
        }
      out.value = best;
      out.method = "monte_carlo";
      return out;
    }
    case SystemKind::Ifs: {
      for (auto& e : g.es)
        for (auto& f : g.fs) {
          Ival diff = mixing_diff_ifs(sys, mu, e.first, e.second, n, f.first, f.second);
          double mf = mu.interval(f.first, f.second, /*ifs_depth=*/60).lo;
          if (mf <= 0) continue;
          best = std::max(best, diff.hi / mf);
        }
      out.value = best;
      out.method = "cylinder_algebra";
      return out;
    }
    case SystemKind::Gauss: {
      for (auto& e : g.es)
        for (auto& f : g.fs) {
          double inter = mixing_mc(sys, mu, e.first, e.second, n, f.first, f.second,
                                   mc_samples, seed, threads);
          double me = mu.interval(e.first, e.second).mid();
          double mf = mu.interval(f.first, f.second).mid();
          best = std::max(best, std::fabs(inter - me * mf) / mf);
        }
      out.value = best;
      out.method = "monte_carlo";
      return out;
    }
    case SystemKind::Rotation: {
      double alpha = sys.rotation_angle(96).mid.to_double();
      double shift = double(n) * alpha;
      shift -= std::floor(shift);
      for (auto& e : g.es)
        for (auto& f : g.fs) {
          double inter = arc_overlap(e.first, e.second, f.first, f.second, -shift);
          double lf = f.second - f.first;
          best = std::max(best, std::fabs(inter - (e.second - e.first) * lf) / lf);
        }
      out.value = best;
      out.method = "arc_overlap";
      return out;
    }
  }
  fail(Errc::Internal, "unreachable");
}

namespace {

// Mobius data of a random Gauss cylinder of order m: x = (h1 + h0 y)/(k1 + k0 y).
struct GaussCyl {
  long h1, h0, k1, k0;
  double lo, hi;  // realized interval
  double forward(double x) const {
    // y = T^m x = (h1 - k1 x) / (k0 x - h0)
    return (double(h1) - double(k1) * x) / (double(k0) * x - double(h0));
  }
};

GaussCyl random_gauss_cylinder(int m, uint64_t seed, uint64_t index) {
  BitTape tape(seed, /*stream=*/13, index);
  long h1 = 0, h0 = 1, k1 = 1, k0 = 0;
  for (int i = 0; i < m; ++i) {
    long d = 1 + long(tape.word(uint64_t(i)) % 7);
    long h = d * h1 + h0, k = d * k1 + k0;
    h0 = h1;
    h1 = h;
    k0 = k1;
    k1 = k;
  }
  double a = double(h1) / double(k1), b = double(h1 + h0) / double(k1 + k0);
  if (a > b) std::swap(a, b);
  return {h1, h0, k1, k0, a, b};
}

double tape_unit(const BitTape& tape, uint64_t w) {
  return double(tape.word(w)) * (1.0 / 18446744073709551616.0);
}

}  // namespace

double check_distortion(const SystemSpec& sys, int m, long samples, uint64_t seed) {
  switch (sys.kind) {
    case SystemKind::Beta:
    case SystemKind::Ifs:
      return 1.0;  // piecewise linear: exact
    case SystemKind::Rotation:
      return 1.0;  // isometry
    case SystemKind::Gauss: {
      double k1max = 1.0;
      for (long s = 0; s < samples; ++s) {
        GaussCyl cyl = random_gauss_cylinder(m, seed, uint64_t(s));
        BitTape tape(seed, /*stream=*/14, uint64_t(s));
        double w = cyl.hi - cyl.lo;
        double x = cyl.lo + w * tape_unit(tape, 0);
        double y = cyl.lo + w * tape_unit(tape, 1);
        double z = cyl.lo + w * tape_unit(tape, 2);
        if (x == y || x == z) continue;
        double rxy = std::fabs(cyl.forward(x) - cyl.forward(y)) / std::fabs(x - y);
        double rxz = std::fabs(cyl.forward(x) - cyl.forward(z)) / std::fabs(x - z);
        if (rxy <= 0 || rxz <= 0) continue;
        double ratio = rxy / rxz;
        k1max = std::max(k1max, std::max(ratio, 1.0 / ratio));
      }
      return k1max;
    }
  }
  fail(Errc::Internal, "unreachable");
}

ExpandingReport check_expanding(const SystemSpec& sys, int m_lo, int m_hi) {
  ExpandingReport rep;
  for (int m = m_lo; m <= m_hi; ++m) rep.min_kj.push_back({m, min_kj(sys, m)});
  rep.grows = rep.min_kj.size() < 2 ||
              rep.min_kj.back().second > rep.min_kj.front().second * 1.5;
  return rep;
}

double check_kj_sum(const SystemSpec& sys, int m_lo, int m_hi) {
  double sup = 0.0;
  CylinderOptions opt;
  for (int m = m_lo; m <= m_hi; ++m) {
    if (sys.kind == SystemKind::Gauss && std::pow(double(opt.gauss_digit_cap), double(m)) > double(opt.max_count))
      break;  // enumeration guard; the tail bound keeps reported values honest
    sup = std::max(sup, kj_sum(sys, m, opt));
  }
  return sup;
}

double check_conformality(const SystemSpec& sys, int m, long samples, uint64_t seed) {
  switch (sys.kind) {
    case SystemKind::Beta:
    case SystemKind::Ifs:
    case SystemKind::Rotation:
      return 1.0;  // piecewise linear/isometric: exact
    case SystemKind::Gauss: {
      double k2max = 1.0;
      for (long s = 0; s < samples; ++s) {
        GaussCyl cyl = random_gauss_cylinder(m, seed, uint64_t(s));
        BitTape tape(seed, /*stream=*/15, uint64_t(s));
        double w = cyl.hi - cyl.lo;
        double x = cyl.lo + w * (0.25 + 0.5 * tape_unit(tape, 0));
        double r = 0.2 * w * (0.1 + 0.9 * tape_unit(tape, 1));
        if (x - r <= cyl.lo || x + r >= cyl.hi) continue;
        double kj = double(cyl.k1) * double(cyl.k1);
        double y0 = cyl.forward(x);
        double dplus = std::max(std::fabs(cyl.forward(x + r) - y0),
                                std::fabs(cyl.forward(x - r) - y0));
        double dminus = std::min(std::fabs(cyl.forward(x + r) - y0),
                                 std::fabs(cyl.forward(x - r) - y0));
        if (dminus <= 0) continue;
        k2max = std::max(k2max, std::max(dplus / (kj * r), kj * r / dminus));
      }
      return k2max;
    }
  }
  fail(Errc::Internal, "unreachable");
}

namespace {

// Exact pseudo-Markov check over interval cells with Q(beta) endpoints.
// Cells are [pt[i], pt[i+1]); the image of each is again an interval with
// endpoints in the point set, so the containment tests are exact sign tests.
PseudoMarkovResult beta_pseudo_markov_cells(const SystemSpec& sys,
                                            std::vector<QBeta> pts,
                                            const std::string& partition) {
  const BetaNumber& beta = sys.beta;
  std::sort(pts.begin(), pts.end(), [](const QBeta& x, const QBeta& y) { return x < y; });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const QBeta& x, const QBeta& y) { return x == y; }),
            pts.end());
  size_t ncells = pts.size() - 1;
  std::vector<QBeta> img_lo, img_hi;
  for (size_t i = 0; i < ncells; ++i) {
    // branch of cell i from its left endpoint
    long d = pts[i].mul_beta().floor();
    long maxd = beta.is_integer() ? beta.integer_value() - 1 : beta.floor();
    if (d > maxd) d = maxd;
    img_lo.push_back(pts[i].mul_beta().add_int(-d));
    img_hi.push_back(pts[i + 1].mul_beta().add_int(-d));
  }
  PseudoMarkovResult rep;
  rep.partition = partition;
  for (size_t i = 0; i < ncells; ++i) {
    for (size_t j = 0; j < ncells; ++j) {
      // TX_i = [img_lo, img_hi), X_j = [pts[j], pts[j+1])
      bool intersects = img_lo[i].cmp(pts[j + 1]) < 0 && pts[j].cmp(img_hi[i]) < 0;
      if (!intersects) continue;
      bool contained = img_lo[i].cmp(pts[j]) <= 0 && pts[j + 1].cmp(img_hi[i]) <= 0;
      if (!contained) {
        rep.holds = false;
        rep.witness = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        return rep;
      }
    }
  }
  rep.holds = true;
  Measure mu(sys);
  double tau = 1.0;
  for (size_t i = 0; i < ncells; ++i) {
    double lo = img_lo[i].to_double(), hi = img_hi[i].to_double();
    tau = std::min(tau, mu.interval(lo, hi).mid());
  }
  rep.tau = tau;
  return rep;
}

}  // namespace

PseudoMarkovResult check_pseudo_markov(const SystemSpec& sys) {
  switch (sys.kind) {
    case SystemKind::Gauss: {
      // every digit branch maps onto (0,1): analytic, with an orbit spot check
      for (long d : {1L, 2L, 7L}) {
        double mid = 0.5 * (1.0 / double(d + 1) + 1.0 / double(d));
        CertifiedPoint x = CertifiedPoint::exact(mid, 128);
        CertifiedPoint y = apply(SystemSpec::parse("gauss"), x);
        double yv = y.mid.to_double();
        if (!(yv > 0.0 && yv < 1.0))
          fail(Errc::Internal, "Gauss branch image spot check failed");
      }
      return {true, 1.0, "", "analytic"};
    }
    case SystemKind::Ifs: {
      // T X_i = attractor for every branch: verify theta_i^-1(cell_i) = hull
      for (const auto& c : sys.cells) {
        const IfsMap& m = sys.maps[size_t(c.branch)];
        mpq_class lo = (c.lo - m.shift) / m.ratio;
        mpq_class hi = (c.hi - m.shift) / m.ratio;
        if (lo != sys.hull_lo || hi != sys.hull_hi)
          return {false, 0.0, "(" + std::to_string(c.branch) + ",?)", "standard"};
      }
      return {true, 1.0, "", "standard"};
    }
    case SystemKind::Rotation: {
      // cells [0,1-a) and [1-a,1); images [a,1) and [0,a)
      CertifiedPoint a = sys.rotation_angle(256);
      double av = a.mid.to_double();
      double cells[3] = {0.0, 1.0 - av, 1.0};
      double ilo[2] = {av, 0.0}, ihi[2] = {1.0, av};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          bool inter = ilo[i] < cells[j + 1] && cells[j] < ihi[i];
          bool cont = ilo[i] <= cells[j] && cells[j + 1] <= ihi[i];
          if (inter && !cont)
            return {false, 0.0,
                    "(" + std::to_string(i) + "," + std::to_string(j) + ")",
                    "standard"};
        }
      return {true, std::min(av, 1.0 - av), "", "standard"};
    }
    case SystemKind::Beta: {
      const BetaNumber& beta = sys.beta;
      long L = beta.branch_count();
      std::vector<QBeta> pts;
      QBeta inv = QBeta::inv_beta(&beta);
      pts.push_back(QBeta::zero(&beta));
      pts.push_back(QBeta::one(&beta));
      for (long i = 1; i < L; ++i) pts.push_back(inv.mul_rat(mpq_class(i)));
      PseudoMarkovResult std_res = beta_pseudo_markov_cells(sys, pts, "standard");
      if (std_res.holds || beta.is_integer()) return std_res;
      // refine at the forward orbit of 1 when the expansion of 1 terminates
      ParryCoding parry = parry_digits(beta, 64);
      if (!parry.m_xi) return std_res;
      std::vector<QBeta> refined = pts;
      for (int k = 1; k < *parry.m_xi; ++k) {
        const QBeta& v = parry.remainders[size_t(k)];
        if (v.sign() > 0 && v.cmp(QBeta::one(&beta)) < 0) refined.push_back(v);
      }
      PseudoMarkovResult ref_res =
          beta_pseudo_markov_cells(sys, refined, "refined-orbit-of-1");
      if (ref_res.holds) return ref_res;
      return std_res;  // report the standard-partition witness
    }
  }
  fail(Errc::Internal, "unreachable");
}

ConditionReport full_conditions(const SystemSpec& sys, const ConditionOptions& opt) {
  ConditionReport rep;
  rep.system = sys.id();
  rep.delta = sys.delta;
  rep.ahlfors = check_ahlfors(sys, opt.ahlfors_centers, opt.ahlfors_radii, opt.seed);
  for (long n : opt.mixing_ns)
    rep.mixing.push_back(
        estimate_mixing(sys, n, opt.grid, opt.mc_samples, opt.seed, opt.threads));
  if (rep.mixing.size() >= 2) {
    double first = rep.mixing.front().value, last = rep.mixing.back().value;
    rep.mixing_decays = last < std::max(0.05, 0.5 * std::max(first, 1e-9)) || last < 1e-6;
  }
  rep.distortion_k1 = check_distortion(sys, opt.distortion_m, opt.distortion_samples, opt.seed);
  rep.k1_method = sys.kind == SystemKind::Gauss ? "grid_estimate" : "exact";
  rep.expanding = check_expanding(sys, 1, opt.expanding_m_hi);
  rep.kj_sum_sup = check_kj_sum(sys, 1, std::min(opt.expanding_m_hi,
                                                 sys.kind == SystemKind::Gauss ? 3 : opt.expanding_m_hi));
  switch (sys.kind) {
    case SystemKind::Beta: rep.kj_sum_method = "enumeration"; break;
    case SystemKind::Ifs: rep.kj_sum_method = "closed_form"; break;
    case SystemKind::Gauss: rep.kj_sum_method = "capped_enumeration+tail_bound"; break;
    case SystemKind::Rotation: rep.kj_sum_method = "enumeration"; break;
  }
  rep.conformality_k2 = check_conformality(sys, opt.distortion_m, opt.distortion_samples, opt.seed);
  rep.k2_method = sys.kind == SystemKind::Gauss ? "grid_estimate" : "exact";
  rep.pseudo_markov = check_pseudo_markov(sys);
  if (!rep.expanding.grows)
    rep.flags.push_back("expanding property fails: min K_J does not grow");
  if (!rep.mixing_decays)
    rep.flags.push_back("uniform mixing not observed on the grid");
  return rep;
}

}  // namespace twistrec
