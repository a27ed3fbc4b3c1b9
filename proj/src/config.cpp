#include "bayesplan/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bayesplan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string ConfigSection::get(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : std::stod(it->second);
}

int ConfigSection::get_int(const std::string& key, int fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : std::stoi(it->second);
}

std::uint64_t ConfigSection::get_u64(const std::string& key,
                                     std::uint64_t fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : std::stoull(it->second);
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::vector<ConfigSection> parse_config_text(const std::string& text) {
  std::vector<ConfigSection> sections;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config: malformed section: " + line);
      }
      sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value: " + line);
    }
    if (sections.empty()) sections.push_back({"", {}});
    sections.back().values[trim(line.substr(0, eq))] =
        trim(line.substr(eq + 1));
  }
  return sections;
}

std::vector<ConfigSection> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoull(item));
    } else {
      const std::uint64_t lo = std::stoull(trim(item.substr(0, dots)));
      const std::uint64_t hi = std::stoull(trim(item.substr(dots + 2)));
      if (hi < lo) throw std::invalid_argument("config: bad range " + item);
      for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (std::uint64_t v : parse_u64_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

}  // namespace bayesplan
