#include "dsg/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace dsg {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && (line[i] == '#' || line[i] == ';')) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

Config Config::parse_string(const std::string& text,
                            const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": key '" + key + "' outside any [section]");
    cfg.sections_[section][key] = Entry{value, line_no};
  }
  return cfg;
}

void Config::fail(const std::string& section, const std::string& key,
                  const std::string& reason) const {
  const Entry* e = find(section, key);
  const std::string line = e ? ":" + std::to_string(e->line) : "";
  throw ConfigError(origin_ + line + ": [" + section + "]." + key + ": " +
                    reason);
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

const Config::Entry& Config::require(const std::string& section,
                                     const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) fail(section, key, "missing required key");
  return *e;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  return unquote(require(section, key).value);
}

double Config::get_real(const std::string& section,
                        const std::string& key) const {
  const Entry& e = require(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(section, key, "expected a real number, got '" + e.value + "'");
  }
}

long Config::get_int(const std::string& section, const std::string& key) const {
  const Entry& e = require(section, key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(section, key, "expected an integer, got '" + e.value + "'");
  }
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const std::string v = require(section, key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(section, key, "expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_reals(const std::string& section,
                                      const std::string& key) const {
  const Entry& e = require(section, key);
  std::vector<double> out;
  for (const std::string& item : split_items(e.value)) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      fail(section, key, "expected real numbers, got '" + item + "'");
    }
  }
  if (out.empty()) fail(section, key, "empty array");
  return out;
}

std::vector<long> Config::get_ints(const std::string& section,
                                   const std::string& key) const {
  const Entry& e = require(section, key);
  std::vector<long> out;
  for (const std::string& item : split_items(e.value)) {
    try {
      out.push_back(std::stol(item));
    } catch (...) {
      fail(section, key, "expected integers, got '" + item + "'");
    }
  }
  if (out.empty()) fail(section, key, "empty array");
  return out;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_real(const std::string& section, const std::string& key,
                        double fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key,
                     long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [section, entries] : sections_) {
    feed(section);
    for (const auto& [key, entry] : entries) {
      feed(key);
      feed(entry.value);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace dsg
