#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsg {

// Raised on malformed or missing configuration; the message carries a
// "file:line: [section].key" diagnostic.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sectioned key-value configuration:
//
//   [cascade]
//   r = 2
//   zetas = 0.25 0.75     # arrays are space- or comma-separated
//   h_file = "h.json"     # strings may be quoted
//
// '#' and ';' start comments. Keys are looked up as [section].key.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<inline>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section,
                         const std::string& key) const;
  double get_real(const std::string& section, const std::string& key) const;
  long get_int(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_reals(const std::string& section,
                                const std::string& key) const;
  std::vector<long> get_ints(const std::string& section,
                             const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key,
                  double fallback) const;
  long get_int(const std::string& section, const std::string& key,
               long fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  // FNV-1a hash of the canonicalized (section, key, value) content, hex.
  std::string hash() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& reason) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section,
                       const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace dsg
