#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "qlink/cli/commands.hpp"
#include "qlink/cli/run_config.hpp"
#include "qlink/cli/sweep.hpp"
#include "qlink/core/parallel.hpp"

using namespace qlink;
using namespace qlink::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / ("qlink_cli_" + std::to_string(::getpid()));
const struct Cleanup {
  ~Cleanup() { fs::remove_all(kRoot); }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qlink");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("axes") {
  const auto a = linspace_axis("x", 1, 3, 5);
  CHECK(a.values == std::vector<double>{1, 1.5, 2, 2.5, 3});
  CHECK(linspace_axis("x", 2, 2, 1).values == std::vector<double>{2});
  CHECK_THROWS_AS(linspace_axis("x", 0, 1, 0), UsageError);
  CHECK_THROWS_AS(linspace_axis("x", 1, 0, 3), UsageError);
  CHECK_THROWS_AS(linspace_axis("x", 1, 1, 3), UsageError);
  CHECK_THROWS_AS(linspace_axis("x", 0, std::nan(""), 3), UsageError);
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK(format_double(250) == "250");
}

TEST_CASE("failed sweep row leaves partial csv and manifest") {
  const auto dir = scratch("partial");
  GridSweep sweep{linspace_axis("a", 0, 4, 5), linspace_axis("b", 0, 1, 2), "v", [](std::size_t i) {
                    if (i == 2) throw IntegrationError("row two diverged");
                    return std::vector<double>{double(i), double(i) + 0.5};
                  }};
  CHECK_THROWS_AS(run_grid(sweep, 1, dir, "grid.csv"), SweepFailure);
  const auto csv = slurp(dir / "grid.csv");
  CHECK(csv.rfind("a,b,v\n0,0,0\n0,1,0.5\n1,0,1\n1,1,1.5\n", 0) == 0);
  CHECK(csv.find("\n2,") == std::string::npos);
  const auto m = read_json(dir / "grid.csv.manifest.json");
  CHECK(m["failed_row"] == 2);
  CHECK(m["rows"] == 5);
  const auto done = m["completed_rows"].get<std::vector<int>>();
  CHECK(std::find(done.begin(), done.end(), 0) != done.end());
  CHECK(std::find(done.begin(), done.end(), 1) != done.end());
  CHECK(std::find(done.begin(), done.end(), 2) == done.end());
  CHECK(m["error"].get<std::string>().find("row two diverged") != std::string::npos);
}

TEST_CASE("grid output does not depend on worker count") {
  const auto d1 = scratch("w1"), d8 = scratch("w8");
  const std::vector<std::string> grid = {"--set", "stirap.n_sigma=4", "--set", "stirap.n_dt=3",
                                         "--set", "stirap.sigma_max_ns=120", "--set", "stirap.dt_max_ns=60"};
  auto a1 = grid, a8 = grid;
  a1.insert(a1.begin(), {"stirap", "--workers", "1", "--out", d1.string()});
  a8.insert(a8.begin(), {"stirap", "--workers", "8", "--out", d8.string()});
  REQUIRE(invoke(a1).code == 0);
  REQUIRE(invoke(a8).code == 0);
  const auto s1 = slurp(d1 / "stirap.csv");
  CHECK(s1 == slurp(d8 / "stirap.csv"));
  CHECK(std::count(s1.begin(), s1.end(), '\n') == 1 + 4 * 3);

  const std::vector<std::string> chev = {"chevron", "--set", "chevron.n_freq=6", "--set", "chevron.n_len=11"};
  auto c1 = chev, c8 = chev;
  c1.insert(c1.end(), {"--workers", "1", "--out", d1.string()});
  c8.insert(c8.end(), {"--workers", "8", "--out", d8.string()});
  REQUIRE(invoke(c1).code == 0);
  REQUIRE(invoke(c8).code == 0);
  CHECK(slurp(d1 / "chevron.csv") == slurp(d8 / "chevron.csv"));
}

TEST_CASE("every run writes config echo, metadata and summary") {
  const auto d = scratch("meta");
  const auto r = invoke({"bell", "--out", d.string(), "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto meta = read_json(d / "metadata.json");
  CHECK(meta["command"] == "bell");
  CHECK(meta["seed"] == 9);
  CHECK(meta["status"] == "ok");
  CHECK(meta["wall_time_s"].get<double>() >= 0);
  CHECK(meta.contains("version"));
  for (const char* f : {"config.ini", "summary.json", "density_matrix.json", "pauli.csv"}) CHECK(fs::exists(d / f));
  const auto rho = read_json(d / "density_matrix.json");
  CHECK(rho["real"].size() == 4);
  CHECK(rho["imag"][0].size() == 4);
  double tr = 0;
  for (int i = 0; i < 4; ++i) tr += rho["real"][i][i].get<double>();
  CHECK(tr == doctest::Approx(1).epsilon(1e-9));
  // The echoed config reproduces the run.
  const auto again = scratch("meta2");
  REQUIRE(invoke({"bell", "--config", (d / "config.ini").string(), "--out", again.string()}).code == 0);
  CHECK(slurp(d / "density_matrix.json") == slurp(again / "density_matrix.json"));
}

TEST_CASE("config precedence: defaults < file < --set < flags") {
  const auto d = scratch("prec");
  const auto ini = d / "run.ini";
  std::ofstream(ini) << "[run]\nseed = 5\n[model]\ng_eff_mhz = 2.5\n";
  auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = {"modes", "--config", ini.string(), "--out", (d / "o").string()};
    a.insert(a.end(), extra.begin(), extra.end());
    REQUIRE(invoke(a).code == 0);
    return read_json(d / "o" / "metadata.json")["seed"].get<int>();
  };
  CHECK(seed_of({}) == 5);
  CHECK(seed_of({"--set", "run.seed=6"}) == 6);
  CHECK(seed_of({"--set", "run.seed=6", "--seed", "7"}) == 7);

  RunFlags f;
  CHECK(resolve_run("modes", f).network.g_eff == doctest::Approx(2e6));
  ::setenv(kConfigEnv, ini.string().c_str(), 1);
  CHECK(resolve_run("modes", f).network.g_eff == doctest::Approx(2.5e6));
  f.overrides = {"model.g_eff_mhz=1.5"};
  CHECK(resolve_run("modes", f).network.g_eff == doctest::Approx(1.5e6));
  ::unsetenv(kConfigEnv);
}

TEST_CASE("exit codes") {
  const auto d = scratch("codes");
  const auto out = d.string();
  CHECK(invoke({"teleport", "--out", out}).code == kUsage);
  CHECK(invoke({}).code == kUsage);
  CHECK(invoke({"modes", "--workers", "-3", "--out", out}).code == kUsage);
  CHECK(invoke({"transfer", "--set", "transfer.bogus=1", "--out", out}).code == kUsage);
  CHECK(invoke({"transfer", "--set", "nosuchsection.x=1", "--out", out}).code == kUsage);
  CHECK(invoke({"transfer", "--set", "transfer.step_ns=abc", "--out", out}).code == kUsage);
  CHECK(invoke({"modes", "--config", (d / "missing.ini").string(), "--out", out}).code == kUsage);
  CHECK(invoke({"bell", "--sender", "2", "--out", out}).code == kUsage);
  const auto empty = invoke({"delay-cal", "--set", "delay_cal.n_delay=0", "--out", out});
  CHECK(empty.code == kUsage);
  CHECK(empty.err.find("empty") != std::string::npos);
  CHECK(invoke({"--help"}).code == kOk);

  // A failing solver row exits 3 and leaves a manifest next to the partial grid.
  const auto fail = invoke({"stirap", "--set", "stirap.n_sigma=2", "--set", "stirap.n_dt=2", "--set",
                         "stirap.amplitude_mhz=5000", "--out", out});
  CHECK(fail.code == kSolver);
  CHECK(fs::exists(d / "stirap.csv.manifest.json"));
  CHECK(read_json(d / "metadata.json")["status"] == "failed");
}

TEST_CASE("sender flag and delay calibration") {
  const auto d = scratch("delay");
  const std::vector<std::string> base = {"delay-cal", "--set", "model.skew_q2_ns=10", "--set",
                                         "delay_cal.n_length=6", "--out", d.string()};
  REQUIRE(invoke(base).code == 0);
  CHECK(read_json(d / "summary.json")["center_ns"].get<double>() == doctest::Approx(-10));
  auto b2 = base;
  b2.insert(b2.end(), {"--sender", "2"});
  REQUIRE(invoke(b2).code == 0);
  CHECK(read_json(d / "summary.json")["center_ns"].get<double>() == doctest::Approx(10));
}

TEST_CASE("modes and coherence commands") {
  const auto d = scratch("modes");
  const auto r = invoke({"modes", "--out", d.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("dark: detuning 0 MHz") != std::string::npos);
  const auto s = read_json(d / "summary.json");
  CHECK(s["modes"].size() == 3);
  REQUIRE(invoke({"coherence", "--set", "coherence.n_wait=7", "--out", d.string()}).code == 0);
  CHECK(read_json(d / "summary.json")["time_constant_ns"].get<double>() == doctest::Approx(550).epsilon(0.05));
}

TEST_CASE("shipped default.ini reproduces the built-in defaults") {
  const auto d = scratch("defaults");
  const std::string ini = std::string(QLINK_SOURCE_DIR) + "/config/default.ini";
  const std::pair<const char*, const char*> probes[] = {{"transfer", "peak_fidelity"}, {"bell", "fidelity"}};
  for (const auto& [cmd, key] : probes) {
    const auto a = d / (std::string(cmd) + "_builtin"), b = d / (std::string(cmd) + "_file");
    REQUIRE(invoke({cmd, "--out", a.string()}).code == 0);
    REQUIRE(invoke({cmd, "--config", ini, "--out", b.string()}).code == 0);
    // MHz/ns round trips differ from the built-in SI values in the last bits.
    CHECK(read_json(a / "summary.json")[key].get<double>() ==
          doctest::Approx(read_json(b / "summary.json")[key].get<double>()).epsilon(1e-12));
  }
}
