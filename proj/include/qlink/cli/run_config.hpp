#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlink/model/config.hpp"
#include "qlink/model/network.hpp"

namespace qlink::cli {

/// Environment variable naming the config file used when --config is absent.
inline constexpr const char* kConfigEnv = "QLINK_CONFIG";

struct RunConfig {
  std::string command;
  model::Config config;  ///< file contents with --set overrides and --seed folded in
  model::NetworkParams network;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct RunFlags {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;  ///< "section.key=value"
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

/// Loads the config (flag, then $QLINK_CONFIG, then built-in defaults),
/// applies overrides and flags, and checks the section schema. Config
/// problems raise model::ConfigError.
RunConfig resolve_run(const std::string& command, const RunFlags& flags);

/// Typed reads of one protocol section with the keys checked up front.
class Section {
 public:
  Section(const model::Config& cfg, std::string name, const std::set<std::string>& keys);
  double get(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  bool has(const std::string& key) const { return cfg_.has(name_, key); }
  [[noreturn]] void fail(const std::string& key, const std::string& message) const { cfg_.fail(name_, key, message); }

 private:
  const model::Config& cfg_;
  std::string name_;
};

}  // namespace qlink::cli
