#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pivotrepr {

// Flat "key = value" files with optional [section] headers; keys are exposed
// as "section.key". Lines starting with '#' are comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  long require_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<long> get_int_list(const std::string& key, const std::vector<long>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pivotrepr
