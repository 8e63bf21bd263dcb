#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twistrec {

// Flat key=value configuration with optional [section] grouping in files
// (section names become "section.key"). The resolved map is echoed into
// every report so a run can be reproduced byte-for-byte.
class ExperimentConfig {
public:
  static ExperimentConfig from_file(const std::string& path);
  // Parses "# key=value" comment lines out of a report header.
  static ExperimentConfig from_report_header(const std::string& text);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;

  // Deterministically ordered key=value lines of the resolved config.
  std::vector<std::string> echo_lines() const;

  const std::map<std::string, std::string>& map() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

}  // namespace twistrec
