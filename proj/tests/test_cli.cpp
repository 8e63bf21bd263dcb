#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twistrec/cli.hpp"
#include "twistrec/errors.hpp"

using namespace twistrec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_bin(const std::string& args) {
  std::string cmd = std::string(TWISTREC_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

ExperimentConfig base_measure_cfg() {
  ExperimentConfig cfg;
  cfg.set("subcommand", "measure");
  cfg.set("system", "beta:2");
  cfg.set("f", "identity");
  cfg.set("psi", "power:0.01,1");
  cfg.set("n", "5,8");
  cfg.set("samples", "4000");
  cfg.set("seed", "77");
  return cfg;
}

}  // namespace

TEST_CASE("reports are bit-identical across 1, 4, 8 workers") {
  ExperimentConfig cfg = base_measure_cfg();
  std::string baseline;
  for (const char* threads : {"1", "4", "8"}) {
    cfg.set("threads", threads);
    CliResult res = run_experiment(cfg);
    REQUIRE(res.files.size() == 1);
    // the echoed thread count differs by design; strip it before comparing
    std::istringstream in(res.files[0].second);
    std::ostringstream kept;
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("# threads=", 0) != 0) kept << line << "\n";
    if (baseline.empty())
      baseline = kept.str();
    else
      CHECK(baseline == kept.str());
  }
}

TEST_CASE("round-trip: the echoed config reproduces the report byte-for-byte") {
  ExperimentConfig cfg = base_measure_cfg();
  cfg.set("threads", "2");
  CliResult first = run_experiment(cfg);
  REQUIRE(first.files.size() == 1);
  ExperimentConfig echoed =
      ExperimentConfig::from_report_header(first.files[0].second);
  CliResult second = run_experiment(echoed);
  REQUIRE(second.files.size() == 1);
  CHECK(first.files[0].second == second.files[0].second);
}

TEST_CASE("verdict json round-trips through its config block") {
  ExperimentConfig cfg;
  cfg.set("subcommand", "verdict");
  cfg.set("system", "beta:2");
  cfg.set("f", "identity");
  cfg.set("psi", "power:1,2");
  cfg.set("N", "128");
  cfg.set("samples", "150");
  cfg.set("seed", "3");
  CliResult a = run_experiment(cfg);
  CliResult b = run_experiment(cfg);
  CHECK(a.files[0].second == b.files[0].second);
  CHECK(a.files[0].second.find("\"verdict\": \"empirically_null\"") != std::string::npos);
}

TEST_CASE("validation errors name the offending key or hypothesis") {
  ExperimentConfig cfg = base_measure_cfg();
  cfg.set("samples", "notanumber");
  try {
    run_experiment(cfg);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
    CHECK(std::string(e.what()).find("samples") != std::string::npos);
  }
  ExperimentConfig v;
  v.set("subcommand", "verdict");
  v.set("system", "beta:2");
  v.set("psi", "const:0.2");
  v.set("samples", "150");
  v.set("N", "64");
  try {
    run_experiment(v);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
    CHECK(std::string(e.what()).find("vanishing") != std::string::npos);
  }
}

TEST_CASE("binary exit codes: 0 ok, 2 validation") {
  namespace fs = std::filesystem;
  fs::create_directories("/tmp/twistrec_cli_test");
  CHECK(run_bin("oracle --system beta:2 --f identity --psi power:0.01,1 --n 8 "
                "--out /tmp/twistrec_cli_test") == 0);
  CHECK(slurp("/tmp/twistrec_cli_test/oracle.csv").find("total_leb") !=
        std::string::npos);
  CHECK(run_bin("measure --system beta:nope --out /tmp/twistrec_cli_test") == 2);
  CHECK(run_bin("verdict --system beta:2 --psi const:0.5 --samples 120 --N 64 "
                "--out /tmp/twistrec_cli_test") == 2);
}

TEST_CASE("config file parsing with sections and overrides") {
  namespace fs = std::filesystem;
  fs::create_directories("/tmp/twistrec_cli_test");
  {
    std::ofstream out("/tmp/twistrec_cli_test/exp.cfg");
    out << "# comment\n";
    out << "system = beta:2\n";
    out << "psi = power:0.01,1\n";
    out << "f = identity\n";
    out << "n = 5\n";
    out << "samples = 500\n";
    out << "seed = 9\n";
    out << "[tuning]\n";
    out << "knob = 3\n";
  }
  ExperimentConfig cfg = ExperimentConfig::from_file("/tmp/twistrec_cli_test/exp.cfg");
  CHECK(cfg.get_str("system", "") == "beta:2");
  CHECK(cfg.get_long("tuning.knob", 0) == 3);
  CHECK(run_bin("measure --config /tmp/twistrec_cli_test/exp.cfg "
                "--out /tmp/twistrec_cli_test") == 0);
  // CSV formatting contract: header row, LF endings, '.' decimals
  std::string csv = slurp("/tmp/twistrec_cli_test/measures.csv");
  CHECK(csv.find("n,psi_n,mean,ci_low,ci_high,indet,samples,seed\n") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find(',') != std::string::npos);
}

TEST_CASE("cylinders and conditions subcommands emit their schemas") {
  namespace fs = std::filesystem;
  fs::create_directories("/tmp/twistrec_cli_test");
  CHECK(run_bin("cylinders --system beta:golden --order 5 --out /tmp/twistrec_cli_test") == 0);
  std::string csv = slurp("/tmp/twistrec_cli_test/cylinders.csv");
  CHECK(csv.find("word,left,right,length,k_j,is_full\n") != std::string::npos);
  CHECK(run_bin("conditions --system beta:1.9 --samples 2000 --out /tmp/twistrec_cli_test") == 0);
  std::string js = slurp("/tmp/twistrec_cli_test/conditions.json");
  CHECK(js.find("\"holds\": false") != std::string::npos);
  CHECK(js.find("\"witness\": \"(1,1)\"") != std::string::npos);
}

TEST_CASE("indeterminate excess exits with code 3") {
  // an orbit horizon far beyond the precision cap leaves every test
  // indeterminate, which must surface as IndeterminateExcess, not as data
  CHECK(run_bin("measure --system beta:2 --f identity --psi power:0.01,1 "
                "--n 80 --samples 200 --max-precision 64 "
                "--out /tmp/twistrec_cli_test") == 3);
}

TEST_CASE("gauss cylinders report the digit-cap tail mass") {
  namespace fs = std::filesystem;
  fs::create_directories("/tmp/twistrec_cli_test");
  CHECK(run_bin("cylinders --system gauss --order 2 --digit-cap 25 "
                "--out /tmp/twistrec_cli_test") == 0);
  std::string csv = slurp("/tmp/twistrec_cli_test/cylinders.csv");
  CHECK(csv.find("tail_mass_first_digit=") != std::string::npos);
}

TEST_CASE("pairwise and hits subcommands emit their schemas") {
  namespace fs = std::filesystem;
  fs::create_directories("/tmp/twistrec_cli_test");
  CHECK(run_bin("pairwise --system beta:2 --f identity --psi power:0.5,1 "
                "--m-lo 4 --m-hi 7 --samples 2000 --seed 5 "
                "--out /tmp/twistrec_cli_test") == 0);
  std::string pw = slurp("/tmp/twistrec_cli_test/pairwise.csv");
  CHECK(pw.find("m,n,joint,marg_m,marg_n,bound,ratio\n") != std::string::npos);
  // 4 grid values -> 6 pairs (plus header/comments)
  CHECK(std::count(pw.begin(), pw.end(), '\n') >= 7);
  CHECK(run_bin("hits --system beta:2 --f identity --psi power:0.5,1 "
                "--N 64 --samples 50 --seed 5 --out /tmp/twistrec_cli_test") == 0);
  std::string hits = slurp("/tmp/twistrec_cli_test/hits.csv");
  CHECK(hits.find("point_index,n\n") != std::string::npos);
  CHECK(hits.find("# tail_fraction=") != std::string::npos);
  // golden-beta pairwise without a closed form falls back to the
  // conditions-module estimate rather than erroring
  CHECK(run_bin("pairwise --system beta:golden --f identity --psi power:0.5,1 "
                "--m-lo 4 --m-hi 6 --samples 500 --seed 5 "
                "--out /tmp/twistrec_cli_test") == 0);
}
