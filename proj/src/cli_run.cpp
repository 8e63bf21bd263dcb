#include "twistrec/cli.hpp"

#include <cmath>
#include <sstream>

#include "twistrec/conditions.hpp"
#include "twistrec/errors.hpp"
#include "twistrec/oracle.hpp"
#include "twistrec/report.hpp"

namespace twistrec {

namespace {

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stol(part));
  }
  if (out.empty()) fail(Errc::InvalidConfig, "empty integer list: '" + s + "'");
  return out;
}

RunConfig run_config(const ExperimentConfig& cfg) {
  RunConfig rc;
  rc.samples = cfg.get_long("samples", 1000);
  rc.seed = cfg.get_u64("seed", 1);
  rc.threads = int(cfg.get_long("threads", 1));
  rc.min_precision = int(cfg.get_long("precision", 0));
  rc.max_precision = int(cfg.get_long("max_precision", 1 << 15));
  double conf = cfg.get_double("confidence", 0.95);
  if (conf == 0.95)
    rc.confidence_z = 1.959963984540054;
  else if (conf == 0.99)
    rc.confidence_z = 2.5758293035489004;
  else
    fail(Errc::InvalidConfig, "key 'confidence' supports 0.95 or 0.99");
  return rc;
}

void set_default(ExperimentConfig& cfg, const std::string& key,
                 const std::string& value) {
  if (!cfg.has(key)) cfg.set(key, value);
}

}  // namespace

ExperimentConfig resolve_config(const ExperimentConfig& given) {
  ExperimentConfig cfg = given;
  std::string sub = cfg.get_str("subcommand", "");
  if (sub.empty()) fail(Errc::InvalidConfig, "key 'subcommand' is required");
  set_default(cfg, "system", "beta:2");
  set_default(cfg, "seed", "1");
  set_default(cfg, "threads", "1");
  set_default(cfg, "max_precision", "32768");
  set_default(cfg, "confidence", "0.95");
  if (sub == "measure") {
    set_default(cfg, "f", "identity");
    set_default(cfg, "psi", "power:1,1");
    set_default(cfg, "n", "5,10,15");
    set_default(cfg, "samples", "10000");
  } else if (sub == "pairwise") {
    set_default(cfg, "f", "identity");
    set_default(cfg, "psi", "power:0.5,1");
    set_default(cfg, "m_lo", "10");
    set_default(cfg, "m_hi", "20");
    set_default(cfg, "samples", "10000");
    set_default(cfg, "a_n", "");
  } else if (sub == "hits" || sub == "verdict") {
    set_default(cfg, "f", "identity");
    set_default(cfg, "psi", "power:0.5,1");
    set_default(cfg, "N", "1024");
    set_default(cfg, "samples", "200");
    if (sub == "verdict") {
      set_default(cfg, "theta_full", "0.9");
      set_default(cfg, "theta_null", "0.1");
    }
  } else if (sub == "cylinders") {
    set_default(cfg, "order", "5");
    set_default(cfg, "digit_cap", "50");
  } else if (sub == "conditions") {
    set_default(cfg, "samples", "20000");
  } else if (sub == "oracle") {
    set_default(cfg, "f", "identity");
    set_default(cfg, "psi", "power:0.01,1");
    set_default(cfg, "n", "10");
  } else {
    fail(Errc::InvalidConfig, "unknown subcommand: '" + sub + "'");
  }
  return cfg;
}

CliResult run_experiment(const ExperimentConfig& given) {
  ExperimentConfig cfg = resolve_config(given);
  std::string sub = cfg.get_str("subcommand", "");
  CliResult out;
  if (sub == "measure") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    TwistSpec f = TwistSpec::parse(cfg.get_str("f", ""));
    PsiSpec psi = PsiSpec::parse(cfg.get_str("psi", ""));
    RunConfig rc = run_config(cfg);
    std::vector<std::pair<long, MeasureEstimate>> rows;
    for (long n : parse_long_list(cfg.get_str("n", "")))
      rows.push_back({n, estimate_mu_An(sys, f, psi, n, rc)});
    out.files.push_back({"measures.csv", csv_measures(cfg, rows, psi)});
    return out;
  }
  if (sub == "pairwise") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    TwistSpec f = TwistSpec::parse(cfg.get_str("f", ""));
    PsiSpec psi = PsiSpec::parse(cfg.get_str("psi", ""));
    RunConfig rc = run_config(cfg);
    double user_a_n = -1.0;
    std::string a_label = "user";
    std::string a_str = cfg.get_str("a_n", "");
    if (!a_str.empty()) {
      user_a_n = cfg.get_double("a_n", -1.0);
    } else if (!(sys.kind == SystemKind::Ifs ||
                 (sys.kind == SystemKind::Beta && sys.beta.is_integer()))) {
      // no closed form: fall back to the conditions-module estimate at the
      // largest gap, labeled as such
      long span = cfg.get_long("m_hi", 20) - cfg.get_long("m_lo", 10);
      user_a_n = estimate_mixing(sys, std::max(1L, span), 4, 20000, rc.seed,
                                 rc.threads).value;
      a_label = "conditions_estimate";
    }
    PairwiseGrid grid = pairwise_grid(sys, f, psi, cfg.get_long("m_lo", 10),
                                      cfg.get_long("m_hi", 20), rc, user_a_n, a_label);
    out.files.push_back({"pairwise.csv", csv_pairwise(cfg, grid.reports)});
    return out;
  }
  if (sub == "hits") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    TwistSpec f = TwistSpec::parse(cfg.get_str("f", ""));
    PsiSpec psi = PsiSpec::parse(cfg.get_str("psi", ""));
    RunConfig rc = run_config(cfg);
    HitStatistics stats = hit_statistics(sys, f, psi, cfg.get_long("N", 1024), rc);
    out.files.push_back({"hits.csv", csv_hits(cfg, stats)});
    return out;
  }
  if (sub == "verdict") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    TwistSpec f = TwistSpec::parse(cfg.get_str("f", ""));
    PsiSpec psi = PsiSpec::parse(cfg.get_str("psi", ""));
    RunConfig rc = run_config(cfg);
    VerdictReport rep = verdict(sys, f, psi, cfg.get_long("N", 1024), rc,
                                cfg.get_double("theta_full", 0.9),
                                cfg.get_double("theta_null", 0.1));
    out.files.push_back({"verdict.json", json_verdict(cfg, rep)});
    return out;
  }
  if (sub == "cylinders") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    CylinderOptions opt;
    opt.gauss_digit_cap = int(cfg.get_long("digit_cap", 50));
    int order = int(cfg.get_long("order", 5));
    auto rows = cylinders_of_order(sys, order, opt);
    std::vector<std::string> extra;
    if (sys.kind == SystemKind::Gauss) {
      // exact uncovered first-digit mass log2(1 + 1/(cap+1)) plus the order-m
      // union bound on all capped coordinates
      double t1 = std::log2(1.0 + 1.0 / double(opt.gauss_digit_cap + 1));
      extra.push_back("tail_mass_first_digit=" + fmt_double(t1));
      extra.push_back("tail_mass_order_bound=" +
                      fmt_double(gauss_tail_mass(order, opt.gauss_digit_cap)));
    }
    out.files.push_back({"cylinders.csv", csv_cylinders(cfg, rows, extra)});
    return out;
  }
  if (sub == "conditions") {
    SystemSpec sys = SystemSpec::parse(cfg.get_str("system", ""));
    ConditionOptions opt;
    opt.seed = cfg.get_u64("seed", 5);
    opt.threads = int(cfg.get_long("threads", 1));
    opt.mc_samples = cfg.get_long("samples", 20000);
    ConditionReport rep = full_conditions(sys, opt);
    out.files.push_back({"conditions.json", json_conditions(cfg, rep)});
    return out;
  }
  if (sub == "oracle") {
    std::string system = cfg.get_str("system", "");
    if (system != "beta:2")
      fail(Errc::InvalidConfig,
           "the exact oracle is defined for system=beta:2 (doubling map)");
    TwistSpec f = TwistSpec::parse(cfg.get_str("f", ""));
    PsiSpec psi = PsiSpec::parse(cfg.get_str("psi", ""));
    long n = cfg.get_long("n", 10);
    double psi_n = psi_eval(psi, n);
    auto ivs = oracle_An_intervals(n, psi_n, f);
    double total = oracle_leb_An(n, psi_n, f);
    out.files.push_back({"oracle.csv", csv_oracle(cfg, ivs, total)});
    return out;
  }
  fail(Errc::InvalidConfig, "unknown subcommand: '" + sub + "'");
}

}  // namespace twistrec
