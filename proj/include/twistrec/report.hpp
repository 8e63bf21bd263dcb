#pragma once

#include <string>
#include <vector>

#include "twistrec/conditions.hpp"
#include "twistrec/config.hpp"
#include "twistrec/cylinders.hpp"
#include "twistrec/estimators.hpp"
#include "twistrec/oracle.hpp"

namespace twistrec {

// Deterministic number formatting: shortest round-trip decimal, '.' decimal
// point, no locale.
std::string fmt_double(double v);

// CSV text with "# key=value" header lines echoing the resolved config;
// LF line endings, header row always.
std::string csv_measures(const ExperimentConfig& cfg,
                         const std::vector<std::pair<long, MeasureEstimate>>& rows,
                         const PsiSpec& psi);
std::string csv_pairwise(const ExperimentConfig& cfg,
                         const std::vector<QuasiIndependenceReport>& rows);
std::string csv_hits(const ExperimentConfig& cfg, const HitStatistics& stats);
std::string csv_cylinders(const ExperimentConfig& cfg,
                          const std::vector<CylinderEntry>& rows,
                          const std::vector<std::string>& extra_comments = {});
std::string csv_oracle(const ExperimentConfig& cfg,
                       const std::vector<OracleInterval>& rows, double total);
std::string json_verdict(const ExperimentConfig& cfg, const VerdictReport& rep);
std::string json_conditions(const ExperimentConfig& cfg, const ConditionReport& rep);

void write_file(const std::string& path, const std::string& text);

}  // namespace twistrec
