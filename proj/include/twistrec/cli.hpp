#pragma once

#include <string>
#include <vector>

#include "twistrec/config.hpp"

namespace twistrec {

struct CliResult {
  std::vector<std::pair<std::string, std::string>> files;  // (filename, text)
};

// Runs one subcommand (key "subcommand") against a fully resolved config and
// returns the report files. Deterministic: identical configs (including the
// seed) produce byte-identical reports regardless of the thread count.
CliResult run_experiment(const ExperimentConfig& cfg);

// Fills defaults for every key the subcommand consumes, so the echoed config
// is complete and round-trips.
ExperimentConfig resolve_config(const ExperimentConfig& given);

}  // namespace twistrec
