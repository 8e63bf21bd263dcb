#include "twistrec/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twistrec/errors.hpp"

namespace twistrec {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void echo_config(std::ostringstream& out, const ExperimentConfig& cfg) {
  for (const auto& line : cfg.echo_lines()) out << "# " << line << "\n";
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : cfg.map()) j[k] = v;
  return j;
}

}  // namespace

std::string csv_measures(const ExperimentConfig& cfg,
                         const std::vector<std::pair<long, MeasureEstimate>>& rows,
                         const PsiSpec& psi) {
  std::ostringstream out;
  echo_config(out, cfg);
  out << "n,psi_n,mean,ci_low,ci_high,indet,samples,seed\n";
  for (const auto& [n, est] : rows) {
    out << n << ',' << fmt_double(psi_eval(psi, n)) << ',' << fmt_double(est.mean)
        << ',' << fmt_double(est.ci_low) << ',' << fmt_double(est.ci_high) << ','
        << est.indeterminate_count << ',' << est.n_samples << ',' << est.seed
        << "\n";
  }
  return out.str();
}

std::string csv_pairwise(const ExperimentConfig& cfg,
                         const std::vector<QuasiIndependenceReport>& rows) {
  std::ostringstream out;
  echo_config(out, cfg);
  out << "m,n,joint,marg_m,marg_n,bound,ratio\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.n << ',' << fmt_double(r.est_joint.mean) << ','
        << fmt_double(r.marg_m.mean) << ',' << fmt_double(r.marg_n.mean) << ','
        << fmt_double(r.bound_value) << ',' << fmt_double(r.ratio) << "\n";
  }
  return out.str();
}

std::string csv_hits(const ExperimentConfig& cfg, const HitStatistics& stats) {
  std::ostringstream out;
  echo_config(out, cfg);
  out << "# mean_sn=" << fmt_double(stats.mean_sn) << "\n";
  out << "# tail_fraction=" << fmt_double(stats.tail_fraction) << "\n";
  out << "# sum_mu_hat=" << fmt_double(stats.mean_sn) << "\n";
  out << "point_index,n\n";
  for (const auto& rec : stats.records)
    for (long n : rec.hit_times) out << rec.point_index << ',' << n << "\n";
  return out.str();
}

std::string csv_cylinders(const ExperimentConfig& cfg,
                          const std::vector<CylinderEntry>& rows,
                          const std::vector<std::string>& extra_comments) {
  std::ostringstream out;
  echo_config(out, cfg);
  for (const auto& line : extra_comments) out << "# " << line << "\n";
  out << "word,left,right,length,k_j,is_full\n";
  for (const auto& c : rows) {
    for (size_t i = 0; i < c.word.size(); ++i) {
      if (i) out << '.';
      out << c.word[i];
    }
    out << ',' << fmt_double(c.left.mid()) << ',' << fmt_double(c.right.mid())
        << ',' << fmt_double(c.length.mid()) << ',' << fmt_double(c.k_j) << ','
        << (c.is_full ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string csv_oracle(const ExperimentConfig& cfg,
                       const std::vector<OracleInterval>& rows, double total) {
  std::ostringstream out;
  echo_config(out, cfg);
  out << "# total_leb=" << fmt_double(total) << "\n";
  out << "branch,lo,hi\n";
  for (const auto& r : rows)
    out << r.branch << ',' << fmt_double(r.lo) << ',' << fmt_double(r.hi) << "\n";
  return out.str();
}

std::string json_verdict(const ExperimentConfig& cfg, const VerdictReport& rep) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["class"] = to_string(rep.series);
  j["verdict"] = rep.verdict;
  j["tail_fraction"] = rep.tail_fraction;
  j["sums"] = {{"sum_psi_delta", rep.sum_psi_delta}, {"sum_mu_hat", rep.sum_mu_hat}};
  j["thresholds"] = {{"theta_full", rep.theta_full}, {"theta_null", rep.theta_null}};
  j["horizon"] = rep.horizon;
  j["samples"] = rep.samples;
  j["conditions_applicable"] = rep.conditions_applicable;
  j["flags"] = rep.flags;
  return j.dump(2) + "\n";
}

std::string json_conditions(const ExperimentConfig& cfg, const ConditionReport& rep) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["system"] = rep.system;
  j["delta"] = rep.delta;
  j["ahlfors"] = {{"eta1", rep.ahlfors.eta1},
                  {"eta2", rep.ahlfors.eta2},
                  {"r0", rep.ahlfors.r0},
                  {"centers", rep.ahlfors.centers},
                  {"radii", rep.ahlfors.radii},
                  {"note", rep.ahlfors.note}};
  nlohmann::ordered_json mixing = nlohmann::ordered_json::array();
  for (const auto& m : rep.mixing)
    mixing.push_back({{"n", m.n}, {"a_n", m.value}, {"method", m.method}});
  j["mixing"] = mixing;
  j["mixing_decays"] = rep.mixing_decays;
  j["distortion_K1"] = rep.distortion_k1;
  j["distortion_method"] = rep.k1_method;
  nlohmann::ordered_json mk = nlohmann::ordered_json::array();
  for (const auto& [m, v] : rep.expanding.min_kj)
    mk.push_back({{"m", m}, {"min_KJ", v}});
  j["expanding_min_KJ"] = mk;
  j["expanding_grows"] = rep.expanding.grows;
  j["expanding_method"] = rep.expanding_method;
  j["kj_sum_sup"] = rep.kj_sum_sup;
  j["kj_sum_method"] = rep.kj_sum_method;
  j["conformality_K2"] = rep.conformality_k2;
  j["conformality_method"] = rep.k2_method;
  j["pseudo_markov"] = {{"holds", rep.pseudo_markov.holds},
                        {"tau", rep.pseudo_markov.tau},
                        {"witness", rep.pseudo_markov.witness},
                        {"partition", rep.pseudo_markov.partition}};
  j["flags"] = rep.flags;
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::InvalidConfig, "cannot write output file: " + path);
  out << text;
}

}  // namespace twistrec
