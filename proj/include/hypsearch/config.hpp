#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hypsearch {

// Flat `key = value` document: one pair per line, # comments, values
// optionally double-quoted. Duplicate keys keep the last value.
std::map<std::string, std::string> parse_flat_config(const std::string& path);
std::map<std::string, std::string> parse_flat_config_text(const std::string& body);

// Typed lookups over a parsed document; missing keys fall back to the
// default, malformed values throw InvalidConfig naming the key.
struct ConfigView {
  const std::map<std::string, std::string>& values;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  uint64_t get_uint(const std::string& key, uint64_t fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
};

}  // namespace hypsearch
