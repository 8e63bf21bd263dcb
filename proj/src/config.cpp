#include "twistrec/config.hpp"

#include <fstream>
#include <sstream>

#include "twistrec/errors.hpp"

namespace twistrec {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

void parse_line(ExperimentConfig& cfg, std::string line, std::string& section) {
  line = trim(line);
  if (line.empty() || line[0] == '#' || line[0] == ';') return;
  if (line.front() == '[' && line.back() == ']') {
    section = trim(line.substr(1, line.size() - 2));
    return;
  }
  auto eq = line.find('=');
  if (eq == std::string::npos)
    fail(Errc::InvalidConfig, "config line is not key=value: '" + line + "'");
  std::string key = trim(line.substr(0, eq));
  std::string val = trim(line.substr(eq + 1));
  if (key.empty()) fail(Errc::InvalidConfig, "empty config key in: '" + line + "'");
  if (!section.empty()) key = section + "." + key;
  cfg.set(key, val);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::InvalidConfig, "cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line, section;
  while (std::getline(in, line)) parse_line(cfg, line, section);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_report_header(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      std::string body = line.substr(2);
      if (body.find('=') != std::string::npos) parse_line(cfg, body, section);
    }
  }
  return cfg;
}

std::string ExperimentConfig::get_str(const std::string& key,
                                      const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t used = 0;
    long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    fail(Errc::InvalidConfig, "key '" + key + "' wants an integer, got '" + it->second + "'");
  }
}

uint64_t ExperimentConfig::get_u64(const std::string& key, uint64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return uint64_t(v);
  } catch (const std::exception&) {
    fail(Errc::InvalidConfig, "key '" + key + "' wants a u64, got '" + it->second + "'");
  }
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    fail(Errc::InvalidConfig, "key '" + key + "' wants a number, got '" + it->second + "'");
  }
}

std::vector<std::string> ExperimentConfig::echo_lines() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : kv_) out.push_back(k + "=" + v);
  return out;
}

}  // namespace twistrec
