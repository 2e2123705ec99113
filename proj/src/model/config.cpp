#include "qlink/model/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qlink::model {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

std::optional<double> to_double(const std::string& s) {
  double v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string location(const std::string& source, int line) {
  if (line <= 0) return source;
  return source + ":" + std::to_string(line);
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : Error(location(source, line) + ": " + message), source_(std::move(source)), line_(line) {}

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    auto hash = raw.find_first_of("#;");
    std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(cfg.source_, lineno, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_name(section)) throw ConfigError(cfg.source_, lineno, "invalid section name '" + section + "'");
      cfg.sections_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(cfg.source_, lineno, "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (section.empty()) throw ConfigError(cfg.source_, lineno, "key '" + key + "' outside any section");
    if (!valid_name(key)) throw ConfigError(cfg.source_, lineno, "invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(cfg.source_, lineno, "empty value for '" + key + "'");
    auto& sec = cfg.sections_[section];
    if (auto it = sec.find(key); it != sec.end())
      throw ConfigError(cfg.source_, lineno,
                        "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    sec[key] = {value, lineno};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("--set", 0, "override must look like section.key=value, got '" + assignment + "'");
  std::string section = trim(assignment.substr(0, dot));
  std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  std::string value = trim(assignment.substr(eq + 1));
  if (!valid_name(section) || !valid_name(key) || value.empty())
    throw ConfigError("--set", 0, "malformed override '" + assignment + "'");
  set(section, key, value, 0);
}

void Config::set(const std::string& section, const std::string& key, std::string value, int line) {
  sections_[section][key] = {std::move(value), line};
}

const ConfigEntry* Config::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

void Config::fail(const std::string& section, const std::string& key, const std::string& message) const {
  const ConfigEntry* e = find(section, key);
  const int line = e ? e->line : 0;
  throw ConfigError(e && line == 0 ? std::string("--set") : source_, line, section + "." + key + ": " + message);
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const ConfigEntry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  auto v = to_double(e->value);
  if (!v) fail(section, key, "expected a number, got '" + e->value + "'");
  return *v;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  long v = 0;
  const char* end = e->value.data() + e->value.size();
  auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(section, key, "expected an integer, got '" + e->value + "'");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(section, key, "expected a boolean, got '" + e->value + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = to_double(trim(item));
    if (!v) fail(section, key, "expected a comma-separated list of numbers");
    out.push_back(*v);
  }
  return out;
}

void Config::check_keys(const std::string& section, const std::set<std::string>& allowed) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return;
  for (const auto& [key, entry] : s->second)
    if (!allowed.count(key)) fail(section, key, "unknown key");
}

void Config::check_sections(const std::set<std::string>& allowed) const {
  for (const auto& [name, keys] : sections_) {
    if (allowed.count(name)) continue;
    int line = 0;
    for (const auto& [k, e] : keys) line = line == 0 ? e.line : std::min(line, e.line);
    throw ConfigError(source_, line, "unknown section [" + name + "]");
  }
}

std::string Config::dump() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, keys] : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << name << "]\n";
    for (const auto& [key, entry] : keys) out << key << " = " << entry.value << '\n';
  }
  return out.str();
}

}  // namespace qlink::model
