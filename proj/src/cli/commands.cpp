#include "qlink/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlink/cli/run_config.hpp"
#include "qlink/cli/sweep.hpp"
#include "qlink/core/parallel.hpp"
#include "qlink/opt/bell_optimizer.hpp"
#include "qlink/protocols/bell.hpp"
#include "qlink/protocols/chevron.hpp"
#include "qlink/protocols/coherence.hpp"
#include "qlink/protocols/stirap.hpp"
#include "qlink/protocols/transfer.hpp"
#include "qlink/tomo/tomography.hpp"

#ifndef QLINK_VERSION
#define QLINK_VERSION "0.0.0"
#endif

namespace qlink::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using protocols::Link;

namespace {

constexpr double MHz = 1e6;
constexpr double ns = 1e-9;

/// Files written by one command, plus the summary that goes to summary.json.
struct Output {
  fs::path dir;
  std::vector<std::string> files;
  json summary = json::object();
  std::ostream* log = nullptr;

  void text(const std::string& name, const std::string& content) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << content;
    files.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  void note(const std::string& name) { files.push_back(name); }
};

std::string csv_row(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) s += (s.empty() ? "" : ",") + format_double(v);
  return s + "\n";
}

json matrix_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"basis", {"gg", "ge", "eg", "ee"}}, {"real", re}, {"imag", im}};
}

double bell_fidelity(const Matrix& m) {
  const Vector psi = protocols::psi_plus();
  return (psi.adjoint() * m * psi)(0).real();
}

/// Applies the fidelity-maximising qubit-2 phase to a reconstructed state.
double phased_fidelity(const DensityMatrix& rho) {
  return bell_fidelity(protocols::apply_phase(rho, protocols::optimal_phase(rho)).matrix());
}

std::string pauli_csv(const tomo::PauliVector& ideal, const tomo::PauliVector* measured) {
  std::string s = measured ? "pauli,ideal,measured\n" : "pauli,value\n";
  for (int k = 0; k < 16; ++k) {
    s += tomo::pauli_label(k) + "," + format_double(ideal[k]);
    if (measured) s += "," + format_double((*measured)[k]);
    s += "\n";
  }
  return s;
}

int checked_qubit(const Section& s, const std::string& key, long fallback) {
  const long q = s.get_int(key, fallback);
  if (q != 1 && q != 2) s.fail(key, "must be 1 or 2");
  return static_cast<int>(q);
}

/// Bell parameters from [bell]; unset keys take the nominal sequence.
protocols::BellParams bell_from(const Link& link, const Section& s) {
  auto p = protocols::nominal_bell_params(link);
  if (s.has("eps1_mhz")) p.eps1 = s.get("eps1_mhz", 0) * MHz;
  if (s.has("eps2_mhz")) p.eps2 = s.get("eps2_mhz", 0) * MHz;
  if (s.has("len1_ns")) p.len1 = s.get("len1_ns", 0) * ns;
  if (s.has("len2_ns")) p.len2 = s.get("len2_ns", 0) * ns;
  p.delay = s.get("delay_ns", p.delay / ns) * ns;
  if (p.len1 < 0) s.fail("len1_ns", "must be non-negative");
  if (p.len2 < 0) s.fail("len2_ns", "must be non-negative");
  return p;
}

json bell_params_json(const protocols::BellParams& p) {
  return {{"eps1_mhz", p.eps1 / MHz}, {"eps2_mhz", p.eps2 / MHz}, {"len1_ns", p.len1 / ns},
          {"len2_ns", p.len2 / ns}, {"delay_ns", p.delay / ns}};
}

const std::set<std::string> kBellKeys = {"eps1_mhz", "eps2_mhz", "len1_ns", "len2_ns", "delay_ns", "phase"};

// ---------------------------------------------------------------- commands

void cmd_modes(const RunConfig& rc, Output& o) {
  const Link link(rc.network);
  const auto& m = link.modes();
  const char* names[3];
  const auto bright = m.bright_indices();
  names[m.dark_index] = "dark";
  names[bright[0]] = "bright_lo";
  names[bright[1]] = "bright_hi";
  std::string csv = "mode,frequency_mhz,detuning_mhz,g1_mhz,g2_mhz,cable_participation\n";
  json modes = json::array();
  for (int j = 0; j < 3; ++j) {
    csv += std::string(names[j]) + "," + format_double(m.frequencies[j] / MHz) + "," +
           format_double(m.detuning(j) / MHz) + "," + format_double(m.couplings[0][j] / MHz) + "," +
           format_double(m.couplings[1][j] / MHz) + "," + format_double(m.cable_participation(j)) + "\n";
    modes.push_back({{"mode", names[j]},
                     {"frequency_mhz", m.frequencies[j] / MHz},
                     {"detuning_mhz", m.detuning(j) / MHz},
                     {"g1_mhz", m.couplings[0][j] / MHz},
                     {"g2_mhz", m.couplings[1][j] / MHz}});
    *o.log << names[j] << ": detuning " << m.detuning(j) / MHz << " MHz, g1 " << m.couplings[0][j] / MHz
           << " MHz, g2 " << m.couplings[1][j] / MHz << " MHz\n";
  }
  o.text("modes.csv", csv);
  o.summary["modes"] = modes;
  for (int q = 0; q < 2; ++q) {
    const double w = link.working_amplitude(q);
    o.summary["working_amplitude_mhz"].push_back(w / MHz);
    o.summary["dark_sideband_mhz"].push_back(link.dark_frequency(q, w) / MHz);
  }
}

void cmd_chevron(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "chevron",
                  {"qubit", "f_lo_mhz", "f_hi_mhz", "n_freq", "max_length_ns", "n_len", "eps_mhz", "spectators",
                   "mode_cutoff_mhz"});
  const Link link(rc.network);
  const int qubit = checked_qubit(s, "qubit", 1);
  const int q = qubit - 1;
  double eps = s.get("eps_mhz", 0) * MHz;
  if (eps < 0) s.fail("eps_mhz", "must be non-negative");
  if (eps == 0) eps = link.working_amplitude(q);
  const double centre = link.dark_frequency(q, eps) / MHz;
  const Axis freq = linspace_axis("frequency_mhz", s.get("f_lo_mhz", centre - 20), s.get("f_hi_mhz", centre + 20),
                                  s.get_int("n_freq", 81));
  const Axis len = linspace_axis("length_ns", 0, s.get("max_length_ns", 500), s.get_int("n_len", 101));
  protocols::ChevronOptions opts;
  opts.include_spectators = s.get_bool("spectators", true);
  opts.mode_cutoff = s.get("mode_cutoff_mhz", 100) * MHz;
  const auto modes = protocols::chevron_modes(link, q, eps, freq.values.front() * MHz, freq.values.back() * MHz, opts);
  std::vector<double> lengths;
  for (double l : len.values) lengths.push_back(l * ns);

  GridSweep sweep{freq, len, "p_excited", [&](std::size_t i) {
                    if (modes.empty()) return std::vector<double>(lengths.size(), 1.0);
                    return protocols::chevron_column(link, q, modes, eps, freq.values[i] * MHz, lengths);
                  }};
  o.note("chevron.csv");
  run_grid(sweep, rc.workers, o.dir, "chevron.csv");
  json labels = json::array();
  for (const auto& m : modes) labels.push_back(m.mode.label);
  o.summary["qubit"] = qubit;
  o.summary["eps_mhz"] = eps / MHz;
  o.summary["modes"] = labels;
  if (modes.empty()) {
    const std::string w = "frequency range contains no mode within the cutoff; map is flat";
    o.summary["warning"] = w;
    *o.log << "warning: " << w << "\n";
  }
}

void cmd_transfer(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "transfer",
                  {"sender", "eps1_mhz", "eps2_mhz", "len1_ns", "len2_ns", "delay_ns", "step_ns", "duration_ns",
                   "budget"});
  const Link link(rc.network);
  protocols::TransferSettings t;
  t.sender = checked_qubit(s, "sender", 1);
  t.eps = {s.get("eps1_mhz", 0) * MHz, s.get("eps2_mhz", 0) * MHz};
  const double def = protocols::default_transfer_length(link) / ns;
  t.length = {s.get("len1_ns", def) * ns, s.get("len2_ns", def) * ns};
  t.delay = s.get("delay_ns", 0) * ns;
  const double step = s.get("step_ns", 1);
  if (!(step > 0)) s.fail("step_ns", "must be positive");
  const double duration =
      s.get("duration_ns", std::max(t.length[0], t.delay + t.length[1]) / ns + std::max(0.0, -t.delay / ns));
  if (!(duration > 0)) s.fail("duration_ns", "must be positive");
  const auto n = static_cast<long>(std::floor(duration / step + 1e-9)) + 1;
  for (long k = 0; k < n; ++k) t.times.push_back(k * step * ns);

  const auto r = protocols::transfer(link, t);
  std::string csv = "time_ns,P_gg,P_ge,P_eg,P_ee,excitation\n";
  for (std::size_t k = 0; k < r.times.size(); ++k)
    csv += csv_row({r.times[k] / ns, r.P_gg[k], r.P_ge[k], r.P_eg[k], r.P_ee[k], r.excitation[k]});
  o.text("transfer.csv", csv);
  o.summary["sender"] = t.sender;
  o.summary["peak_fidelity"] = r.peak_fidelity;
  o.summary["peak_time_ns"] = r.peak_time / ns;
  *o.log << "peak transfer " << r.peak_fidelity << " at " << r.peak_time / ns << " ns\n";
  if (s.get_bool("budget", false)) {
    const auto b = protocols::error_budget(rc.network, t);
    o.summary["error_budget"] = {{"total", b.total}, {"loss_only", b.loss_only}, {"dephasing_only", b.dephasing_only}};
    *o.log << "infidelity " << b.total << " (loss only " << b.loss_only << ", dephasing only " << b.dephasing_only
           << ")\n";
  }
}

void cmd_delay_cal(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "delay_cal",
                  {"sender", "delay_min_ns", "delay_max_ns", "n_delay", "length_min_ns", "length_max_ns", "n_length"});
  const Link link(rc.network);
  const int sender = checked_qubit(s, "sender", 1);
  const Axis delays = linspace_axis("delay_ns", s.get("delay_min_ns", -40), s.get("delay_max_ns", 40),
                                    s.get_int("n_delay", 17));
  const Axis lengths = linspace_axis("length_ns", s.get("length_min_ns", 50), s.get("length_max_ns", 300),
                                     s.get_int("n_length", 26));
  GridSweep sweep{delays, lengths, "p_sender", [&](std::size_t i) {
                    std::vector<double> row;
                    for (double l : lengths.values)
                      row.push_back(protocols::delay_cell(link, sender, delays.values[i] * ns, l * ns));
                    return row;
                  }};
  o.note("delay_cal.csv");
  const auto map = run_grid(sweep, rc.workers, o.dir, "delay_cal.csv");
  const double centre = protocols::symmetry_center(delays.values, map);
  o.summary["sender"] = sender;
  o.summary["center_ns"] = centre;
  *o.log << "symmetry centre " << centre << " ns\n";
}

void cmd_stirap(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "stirap",
                  {"sender", "sigma_min_ns", "sigma_max_ns", "n_sigma", "dt_min_ns", "dt_max_ns", "n_dt",
                   "amplitude_mhz"});
  const Link link(rc.network);
  const int sender = checked_qubit(s, "sender", 1);
  const Axis sigmas = linspace_axis("sigma_ns", s.get("sigma_min_ns", 20), s.get("sigma_max_ns", 400),
                                    s.get_int("n_sigma", 20));
  const Axis dts = linspace_axis("delta_t_ns", s.get("dt_min_ns", 0), s.get("dt_max_ns", 380), s.get_int("n_dt", 20));
  if (!(sigmas.values.front() > 0)) s.fail("sigma_min_ns", "must be positive");
  const double amp = s.get("amplitude_mhz", 0) * MHz;
  if (amp < 0) s.fail("amplitude_mhz", "must be non-negative");
  GridSweep sweep{sigmas, dts, "fidelity", [&](std::size_t i) {
                    std::vector<double> row;
                    for (double dt : dts.values)
                      row.push_back(
                          protocols::stirap_transfer(link, sender, sigmas.values[i] * ns, dt * ns, amp).fidelity);
                    return row;
                  }};
  o.note("stirap.csv");
  const auto map = run_grid(sweep, rc.workers, o.dir, "stirap.csv");
  double best = -1, bs = 0, bd = 0;
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < map[i].size(); ++j)
      if (map[i][j] > best) {
        best = map[i][j];
        bs = sigmas.values[i];
        bd = dts.values[j];
      }
  o.summary["sender"] = sender;
  o.summary["best_fidelity"] = best;
  o.summary["best_sigma_ns"] = bs;
  o.summary["best_delta_t_ns"] = bd;
  *o.log << "best STIRAP fidelity " << best << " at sigma " << bs << " ns, delta_t " << bd << " ns\n";
}

void cmd_bell(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "bell", kBellKeys);
  const Link link(rc.network);
  const auto p = bell_from(link, s);
  std::optional<double> phase;
  const std::string ph = s.get_string("phase", "auto");
  if (ph != "auto") phase = s.get("phase", 0);
  const auto r = protocols::bell_protocol(link, p, phase);
  o.write_json("density_matrix.json", matrix_json(r.rho.matrix()));
  o.write_json("raw_density_matrix.json", matrix_json(r.raw.matrix()));
  o.text("pauli.csv", pauli_csv(tomo::pauli_expectations(r.rho), nullptr));
  o.summary["params"] = bell_params_json(p);
  o.summary["fidelity"] = r.fidelity;
  o.summary["phase_rad"] = r.phase;
  o.summary["purity"] = r.rho.purity();
  *o.log << "Bell fidelity " << r.fidelity << " (phase " << r.phase << " rad)\n";
}

void cmd_tomo(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "tomo", {"shots", "readout_sigma", "repetitions", "calibration_shots"});
  const Section b(rc.config, "bell", kBellKeys);
  const Link link(rc.network);
  const long shots = s.get_int("shots", 10000);
  if (shots < 1) s.fail("shots", "must be positive");
  const double sigma = s.get("readout_sigma", 0.304);
  if (!(sigma > 0)) s.fail("readout_sigma", "must be positive");
  const long reps = s.get_int("repetitions", 10);
  if (reps < 1) s.fail("repetitions", "must be positive");
  const long cal = s.get_int("calibration_shots", 100000);
  if (cal < 1) s.fail("calibration_shots", "must be positive");

  const auto p = bell_from(link, b);
  const auto raw = protocols::bell_protocol(link, p, 0.0).raw;
  const auto model = tomo::ReadoutModel::separated(sigma, shots);
  const auto c = tomo::empirical_confusion(tomo::ReadoutModel::separated(sigma, cal), derive_seed(rc.seed, 0));

  std::string csv = "repetition,fidelity_linear,fidelity_mle\n";
  std::vector<double> lin, mle;
  std::optional<DensityMatrix> first;
  tomo::PauliVector first_paulis{};
  for (long k = 0; k < reps; ++k) {
    const auto data = tomo::measure_all(raw, model, c, derive_seed(rc.seed, static_cast<std::uint64_t>(k) + 1),
                                        rc.workers);
    const auto paulis = tomo::estimate_paulis(data);
    const DensityMatrix est = tomo::project_physical(tomo::linear_estimate(paulis));
    DensityMatrix rho = est;
    try {
      rho = tomo::mle_reconstruct(data).rho;
    } catch (const tomo::MleNotConverged& e) {
      *o.log << "warning: repetition " << k << ": " << e.what() << "; keeping the best iterate\n";
      rho = e.best();
    }
    lin.push_back(phased_fidelity(est));
    mle.push_back(phased_fidelity(rho));
    csv += format_double(static_cast<double>(k)) + "," + format_double(lin.back()) + "," + format_double(mle.back()) +
           "\n";
    if (k == 0) {
      first = protocols::apply_phase(rho, protocols::optimal_phase(rho));
      first_paulis = paulis;
    }
  }
  auto stats = [](const std::vector<double>& v) {
    double m = 0, q = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) q += (x - m) * (x - m);
    return json{{"mean", m}, {"std", v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0}};
  };
  o.text("repetitions.csv", csv);
  o.write_json("density_matrix.json", matrix_json(first->matrix()));
  o.text("pauli.csv", pauli_csv(tomo::pauli_expectations(raw), &first_paulis));
  const double exact = phased_fidelity(raw);
  o.summary["params"] = bell_params_json(p);
  o.summary["exact_fidelity"] = exact;
  o.summary["fidelity_linear"] = stats(lin);
  o.summary["fidelity_mle"] = stats(mle);
  o.summary["confusion_condition"] = tomo::condition_number(c);
  *o.log << "exact " << exact << ", MLE " << o.summary["fidelity_mle"]["mean"].get<double>() << " +- "
         << o.summary["fidelity_mle"]["std"].get<double>() << " over " << reps << " repetitions\n";
}

void cmd_optimize(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "optimize",
                  {"iterations", "batch", "shots", "readout_sigma", "clip", "tomography", "trace", "resume", "pool",
                   "len1_min_ns", "len1_max_ns", "len2_min_ns", "len2_max_ns"});
  const Link link(rc.network);
  auto box = opt::default_bell_box(link);
  const std::pair<const char*, int> bounds[] = {
      {"len1_min_ns", 2}, {"len1_max_ns", 2}, {"len2_min_ns", 3}, {"len2_max_ns", 3}};
  for (const auto& [key, i] : bounds) {
    if (!s.has(key)) continue;
    const bool lower = std::string(key).find("_min_") != std::string::npos;
    (lower ? box.lower : box.upper)(i) = s.get(key, 0) * ns;
  }
  try {
    box.validate();
  } catch (const InvalidArgument& e) {
    s.fail("len1_min_ns", e.what());
  }

  opt::OptimizerOptions opts;
  opts.iterations = static_cast<int>(s.get_int("iterations", 40));
  opts.batch = static_cast<int>(s.get_int("batch", 10));
  if (opts.iterations < 1) s.fail("iterations", "must be positive");
  if (opts.batch < 3) s.fail("batch", "must be at least 3");
  opts.proposal.pool = static_cast<int>(s.get_int("pool", 256));
  opts.proposal.random = 2;
  opts.proposal.filtered = opts.batch - 1 - opts.proposal.random;
  opts.seed = rc.seed;
  opts.workers = rc.workers;
  const fs::path trace = s.get_string("trace", "trace.jsonl");
  opts.trace_path = (trace.is_absolute() ? trace : o.dir / trace).string();
  opts.resume = s.get_bool("resume", false);
  opts.log = [&o](const std::string& m) { *o.log << m << "\n"; };

  opt::BellExperimentOptions ex;
  ex.shots = s.get_int("shots", 2000);
  if (ex.shots < 1) s.fail("shots", "must be positive");
  ex.readout_sigma = s.get("readout_sigma", ex.readout_sigma);
  ex.clip = s.get_bool("clip", true);
  ex.tomography = s.get_bool("tomography", true);

  const auto r = opt::optimize_bell(link, box, opts, ex);
  o.note(trace.string());
  std::string csv = "iteration,best_objective\n";
  for (const auto& rec : r.search.records) csv += csv_row({static_cast<double>(rec.iteration), rec.best});
  o.text("progress.csv", csv);
  o.write_json("density_matrix.json", matrix_json(r.exact.rho.matrix()));
  o.summary["best_params"] = bell_params_json(r.best);
  o.summary["best_objective"] = r.search.best_objective;
  o.summary["exact_fidelity"] = r.exact.fidelity;
  o.summary["tomography_fidelity"] = r.tomography_fidelity;
  o.summary["sender_population"] = r.sender_population;
  o.summary["iterations"] = r.search.records.size();
  o.summary["resumed_iterations"] = r.search.resumed;
  *o.log << "best objective " << r.search.best_objective << ", exact fidelity " << r.exact.fidelity
         << ", tomography fidelity " << r.tomography_fidelity << "\n";
}

void cmd_coherence(const RunConfig& rc, Output& o) {
  const Section s(rc.config, "coherence", {"kind", "target", "qubit", "rate_mhz", "wait_max_ns", "n_wait"});
  const Link link(rc.network);
  const std::string kind = s.get_string("kind", "t1");
  if (kind != "t1" && kind != "ramsey") s.fail("kind", "must be t1 or ramsey");
  const std::string target = s.get_string("target", "dark");
  if (target != "dark" && target != "bright_lo" && target != "bright_hi")
    s.fail("target", "must be dark, bright_lo or bright_hi");
  const int qubit = checked_qubit(s, "qubit", 1);
  const double rate = s.get("rate_mhz", 0) * MHz;
  if (rate < 0) s.fail("rate_mhz", "must be non-negative");
  const Axis waits = linspace_axis("wait_ns", 0, s.get("wait_max_ns", 600), s.get_int("n_wait", 13));
  std::vector<double> w;
  for (double x : waits.values) w.push_back(x * ns);
  const auto r = protocols::mode_coherence_probe(
      link, kind == "t1" ? protocols::ProbeKind::T1 : protocols::ProbeKind::Ramsey, target, w, qubit, rate);
  std::string csv = "wait_ns,signal\n";
  for (std::size_t k = 0; k < w.size(); ++k) csv += csv_row({waits.values[k], r.signal[k]});
  o.text("coherence.csv", csv);
  o.summary["kind"] = kind;
  o.summary["target"] = target;
  o.summary["time_constant_ns"] = r.fit.constant / ns;
  o.summary["amplitude"] = r.fit.amplitude;
  *o.log << (kind == "t1" ? "T1" : "T2") << " of " << target << ": " << r.fit.constant / ns << " ns\n";
}

struct Command {
  std::string name, section, help;
  std::function<void(const RunConfig&, Output&)> run;
  const char* sender_key;  ///< key that --sender maps onto, or null
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"modes", "", "normal modes of the interconnect", cmd_modes, nullptr},
      {"chevron", "chevron", "sideband chevron of one qubit", cmd_chevron, "qubit"},
      {"transfer", "transfer", "single-photon state transfer", cmd_transfer, "sender"},
      {"delay-cal", "delay_cal", "flux-line delay calibration map", cmd_delay_cal, "sender"},
      {"stirap", "stirap", "STIRAP transfer over pulse width and separation", cmd_stirap, "sender"},
      {"bell", "bell", "remote Bell-state preparation", cmd_bell, nullptr},
      {"tomo", "tomo", "simulated two-qubit tomography of the Bell state", cmd_tomo, nullptr},
      {"optimize", "optimize", "Bayesian optimisation of the Bell sequence", cmd_optimize, nullptr},
      {"coherence", "coherence", "T1 / Ramsey probe of a link mode", cmd_coherence, "qubit"},
  };
  return list;
}

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

int execute(const Command& cmd, RunFlags flags, std::optional<int> sender, std::ostream& out, std::ostream& err) {
  if (sender) {
    if (!cmd.sender_key) throw UsageError("--sender does not apply to '" + cmd.name + "'");
    flags.overrides.push_back(cmd.section + "." + cmd.sender_key + "=" + std::to_string(*sender));
  }
  const RunConfig rc = resolve_run(cmd.name, flags);
  Output o;
  o.dir = rc.out;
  o.log = &out;
  std::error_code ec;
  fs::create_directories(o.dir, ec);
  if (ec) throw UsageError("cannot create output directory " + o.dir.string() + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  json meta = {{"version", QLINK_VERSION},
               {"command", cmd.name},
               {"config_source", rc.config.source()},
               {"seed", rc.seed},
               {"workers", rc.workers},
               {"started", iso_now()}};
  auto finish = [&](const std::string& status, const std::string& error) {
    meta["status"] = status;
    if (!error.empty()) meta["error"] = error;
    meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    meta["config"] = rc.config.dump();
    o.text("config.ini", rc.config.dump());
    if (status == "ok") o.write_json("summary.json", o.summary);
    meta["outputs"] = o.files;
    std::ofstream(o.dir / "metadata.json") << meta.dump(2) << '\n';
  };
  try {
    cmd.run(rc, o);
  } catch (const std::exception& e) {
    finish("failed", e.what());
    throw;
  }
  finish("ok", "");
  err.flush();
  out << "wrote " << o.dir.string() << "\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation of a two-chip superconducting quantum link", "qlink"};
  app.set_version_flag("--version", QLINK_VERSION);
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunFlags flags;
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 0, sender = 0;
  auto* o_config = app.add_option("--config", config_path, "config file (default: $QLINK_CONFIG)");
  auto* o_out = app.add_option("--out", out_dir, "output directory (default: out/<command>)");
  auto* o_seed = app.add_option("--seed", seed, "master random seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::Range(0, 1024));
  auto* o_sender = app.add_option("--sender", sender, "sending (or probed) qubit")->check(CLI::Range(1, 2));
  app.add_option("--set", flags.overrides, "override section.key=value (repeatable)")->take_all();

  std::map<const CLI::App*, const Command*> by_app;
  for (const auto& c : commands()) by_app[app.add_subcommand(c.name, c.help)] = &c;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    err << app.help();
    return kUsage;
  }

  if (o_config->count()) flags.config_path = config_path;
  if (o_out->count()) flags.out = out_dir;
  if (o_seed->count()) flags.seed = seed;
  if (o_workers->count()) flags.workers = workers;
  std::optional<int> snd;
  if (o_sender->count()) snd = sender;

  const Command* cmd = by_app.at(app.get_subcommands().front());
  try {
    return execute(*cmd, flags, snd, out, err);
  } catch (const model::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const RangeError& e) {
    err << "out of range: " << e.what() << "\n";
    return kUsage;
  } catch (const SweepFailure& e) {
    err << "sweep failed: " << e.what() << " (partial results and manifest written)\n";
    return kSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace qlink::cli
