#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace intermit::config {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key = value text with dotted sections and '#' comments.  The schema is
// versioned (`schema = 1` is required) and closed: keys outside the known set
// are rejected, both from files and from command-line overrides.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");
  static Config defaults();

  void apply_override(const std::string& key_equals_value);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  void set_checked(const std::string& key, const std::string& value,
                   const std::string& origin);
  std::map<std::string, std::string> kv_;
};

}  // namespace intermit::config
