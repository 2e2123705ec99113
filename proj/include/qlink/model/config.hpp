#pragma once

// Sectioned key-value configuration text:
//
//   # comment
//   [chip1]
//   nu_q_mhz = 4768.5
//
// Values keep the line they came from so that validation errors can point at
// the offending line. Overrides given as "section.key=value" carry line 0.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qlink/core/error.hpp"

namespace qlink::model {

class ConfigError : public Error {
 public:
  ConfigError(std::string source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

class Config {
 public:
  Config() = default;

  static Config parse(std::string_view text, std::string source = "<string>");
  static Config load(const std::string& path);

  /// Applies "section.key=value". Throws ConfigError on malformed input.
  void set_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, std::string value, int line = 0);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }
  const ConfigEntry* find(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  /// Rejects keys (and sections) outside the given schema.
  void check_keys(const std::string& section, const std::set<std::string>& allowed) const;
  void check_sections(const std::set<std::string>& allowed) const;

  /// Error attributed to the line of section.key (or the file as a whole).
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const;

  /// Canonical text form: sections and keys sorted, overrides folded in.
  std::string dump() const;
  const std::string& source() const { return source_; }
  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const { return sections_; }

 private:
  std::string source_ = "<string>";
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

}  // namespace qlink::model
