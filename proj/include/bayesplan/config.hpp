#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bayesplan {

// Plain-text key/value configuration: `key = value` lines grouped under
// `[section]` headers, '#' starts a comment. Section order is preserved and
// section names may repeat.
struct ConfigSection {
  std::string name;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.contains(key); }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

std::vector<ConfigSection> parse_config_text(const std::string& text);
std::vector<ConfigSection> parse_config_file(const std::string& path);

// Integer list syntax: comma-separated entries, each either a number or an
// inclusive range `lo..hi`.
std::vector<std::uint64_t> parse_u64_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace bayesplan
