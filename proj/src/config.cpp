#include "hypsearch/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hypsearch/error.hpp"

namespace hypsearch {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::map<std::string, std::string> parse_flat_config_text(const std::string& body) {
  std::map<std::string, std::string> values;
  std::istringstream lines(body);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::InvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = unquote(trim(stripped.substr(eq + 1)));
    if (key.empty()) {
      throw Error(Errc::InvalidConfig,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    values[key] = value;
  }
  return values;
}

std::map<std::string, std::string> parse_flat_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::MissingFile, "cannot open config " + path);
  }
  std::ostringstream body;
  body << in.rdbuf();
  return parse_flat_config_text(body.str());
}

std::string ConfigView::get_string(const std::string& key,
                                   const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigView::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const char* text = it->second.c_str();
  char* end = nullptr;
  double value = std::strtod(text, &end);
  if (end == text || *end != '\0') {
    throw Error(Errc::InvalidConfig, key + " is not a number: " + it->second);
  }
  return value;
}

int64_t ConfigView::get_int(const std::string& key, int64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const char* text = it->second.c_str();
  char* end = nullptr;
  long long value = std::strtoll(text, &end, 10);
  if (end == text || *end != '\0') {
    throw Error(Errc::InvalidConfig, key + " is not an integer: " + it->second);
  }
  return value;
}

uint64_t ConfigView::get_uint(const std::string& key, uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (!it->second.empty() && it->second[0] == '-') {
    throw Error(Errc::InvalidConfig, key + " must be non-negative: " + it->second);
  }
  const char* text = it->second.c_str();
  char* end = nullptr;
  unsigned long long value = std::strtoull(text, &end, 10);
  if (end == text || *end != '\0') {
    throw Error(Errc::InvalidConfig, key + " is not an integer: " + it->second);
  }
  return value;
}

std::vector<std::string> ConfigView::get_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<std::string> out;
  std::string item;
  std::istringstream parts(it->second);
  while (std::getline(parts, item, ',')) {
    size_t begin = item.find_first_not_of(" \t");
    size_t end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) continue;
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

}  // namespace hypsearch
