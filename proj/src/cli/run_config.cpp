#include "qlink/cli/run_config.hpp"

#include <cstdlib>

namespace qlink::cli {

namespace {

const std::set<std::string> kSections = {"chip1", "chip2", "interconnect", "model", "run", "chevron", "transfer",
                                         "delay_cal", "stirap", "bell", "tomo", "optimize", "coherence"};

}  // namespace

RunConfig resolve_run(const std::string& command, const RunFlags& flags) {
  RunConfig rc;
  rc.command = command;
  std::optional<std::string> path = flags.config_path;
  if (!path)
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  if (path) rc.config = model::Config::load(*path);

  for (const auto& o : flags.overrides) rc.config.set_override(o);
  if (flags.seed) rc.config.set("run", "seed", std::to_string(*flags.seed));

  rc.config.check_sections(kSections);
  rc.config.check_keys("run", {"seed", "workers", "out"});
  const long seed = rc.config.get_int("run", "seed", 1);
  if (seed < 0) rc.config.fail("run", "seed", "must be non-negative");
  rc.seed = static_cast<std::uint64_t>(seed);
  // --workers and --out change where and how fast, not what is computed, so
  // they stay out of the echoed config.
  const long workers = rc.config.get_int("run", "workers", 1);
  if (workers < 0 || workers > 1024) rc.config.fail("run", "workers", "must be between 0 and 1024");
  if (flags.workers && (*flags.workers < 0 || *flags.workers > 1024))
    throw model::ConfigError("--workers", 0, "must be between 0 and 1024");
  rc.workers = flags.workers ? *flags.workers : static_cast<int>(workers);
  rc.out = flags.out ? *flags.out : rc.config.get_string("run", "out", "out/" + command);
  rc.network = model::network_from_config(rc.config);
  return rc;
}

Section::Section(const model::Config& cfg, std::string name, const std::set<std::string>& keys)
    : cfg_(cfg), name_(std::move(name)) {
  cfg_.check_keys(name_, keys);
}

double Section::get(const std::string& key, double fallback) const { return cfg_.get_double(name_, key, fallback); }
long Section::get_int(const std::string& key, long fallback) const { return cfg_.get_int(name_, key, fallback); }
bool Section::get_bool(const std::string& key, bool fallback) const { return cfg_.get_bool(name_, key, fallback); }
std::string Section::get_string(const std::string& key, const std::string& fallback) const {
  return cfg_.get_string(name_, key, fallback);
}

}  // namespace qlink::cli
