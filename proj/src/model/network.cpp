#include "qlink/model/network.hpp"

#include <cmath>
#include <limits>

#include "qlink/core/error.hpp"

namespace qlink::model {

namespace {

constexpr double MHz = 1e6;
constexpr double ns = 1e-9;

double rate_from_t1(double t1) { return std::isinf(t1) ? 0.0 : 1.0 / t1; }

}  // namespace

void NetworkParams::validate() const {
  for (const auto& c : chips) c.validate();
  link.validate();
  if (!(g_eff > 0)) throw InvalidArgument("NetworkParams: g_eff must be positive");
  for (int q = 0; q < 2; ++q) {
    if (dc_maps[q].empty()) throw InvalidArgument("NetworkParams: missing DC-offset map");
    if (qubit_T2(q) > 2.0 * qubit_T1(q) * (1.0 + 1e-12))
      throw InvalidArgument("NetworkParams: drive T2 exceeds 2*T1");
  }
}

NormalModeDecomposition NetworkParams::modes() const {
  return diagonalize_interconnect(link, {chips[0].g_qc, chips[1].g_qc});
}

double NetworkParams::sideband_frequency(int q, double eps, int mode) const {
  const auto m = modes();
  return dc_maps[q].resonance(eps) + (m.frequencies[mode] - m.nu_c);
}

double NetworkParams::dark_rate(int q, double eps, int mode) const {
  const auto m = modes();
  if (mode < 0) mode = m.dark_index;
  return sideband_rate(std::abs(m.couplings[q][mode]), eps, sideband_frequency(q, eps, mode));
}

double NetworkParams::amplitude_for(int q, double rate, int mode) const {
  const auto m = modes();
  if (mode < 0) mode = m.dark_index;
  const double g = std::abs(m.couplings[q][mode]);
  // The modulation frequency depends weakly on eps through the DC offset;
  // a few fixed-point passes converge to machine precision.
  double eps = amplitude_for_rate(g, rate, sideband_frequency(q, dc_maps[q].min_eps(), mode));
  for (int it = 0; it < 50; ++it) {
    if (eps > dc_maps[q].max_eps())
      throw RangeError("sideband rate needs an amplitude beyond the DC-offset calibration");
    const double next = amplitude_for_rate(g, rate, sideband_frequency(q, eps, mode));
    if (std::abs(next - eps) <= 1e-12 * eps) return next;
    eps = next;
  }
  return eps;
}

DcOffsetMap default_dc_map(const DeviceParams& chip, double nu_c) {
  return DcOffsetMap::quadratic(nu_c - chip.nu_q, 4.0 * MHz, 1000.0 * MHz, 1000.0 * MHz, 5);
}

NetworkParams default_network() {
  NetworkParams p;
  p.chips = {default_chip(0), default_chip(1)};
  p.link = default_interconnect();
  p.dc_maps = {default_dc_map(p.chips[0], p.link.nu_c), default_dc_map(p.chips[1], p.link.nu_c)};
  return p;
}

NetworkParams network_from_config(const Config& cfg) {
  NetworkParams p = default_network();

  cfg.check_keys("interconnect", {"nu_c_mhz", "delta_mhz", "g_l_mhz", "t1_bright_ns", "t1_dark_ns",
                                  "t2_dark_ns", "mismatch_mhz"});
  auto& l = p.link;
  l.nu_c = cfg.get_double("interconnect", "nu_c_mhz", l.nu_c / MHz) * MHz;
  l.delta = cfg.get_double("interconnect", "delta_mhz", l.delta / MHz) * MHz;
  l.g_l = cfg.get_double("interconnect", "g_l_mhz", l.g_l / MHz) * MHz;
  l.kappa_bright = rate_from_t1(cfg.get_double("interconnect", "t1_bright_ns", 1.0 / l.kappa_bright / ns) * ns);
  l.kappa_dark = rate_from_t1(cfg.get_double("interconnect", "t1_dark_ns", 1.0 / l.kappa_dark / ns) * ns);
  l.dark_T2 = cfg.get_double("interconnect", "t2_dark_ns", l.dark_T2 / ns) * ns;
  if (std::isinf(l.dark_T2)) l.dark_T2 = 0;
  l.mismatch = cfg.get_double("interconnect", "mismatch_mhz", l.mismatch / MHz) * MHz;
  try {
    l.validate();
  } catch (const InvalidArgument& e) {
    cfg.fail("interconnect", "g_l_mhz", e.what());
  }

  const std::set<std::string> chip_keys = {"nu_q_mhz", "alpha_mhz", "nu_r_mhz", "nu_c_mhz", "nu_m_mhz",
                                           "g_qc_mhz", "g_qr_mhz", "g_qm_mhz", "t1_ns", "t2_ns",
                                           "drive_t1_ns", "drive_t2_ns", "dc_shift_mhz", "dc_eps_max_mhz",
                                           "dc_points", "dc_eps_mhz", "dc_freq_mhz"};
  for (int q = 0; q < 2; ++q) {
    const std::string s = q == 0 ? "chip1" : "chip2";
    cfg.check_keys(s, chip_keys);
    auto& c = p.chips[q];
    c.nu_q = cfg.get_double(s, "nu_q_mhz", c.nu_q / MHz) * MHz;
    c.alpha = cfg.get_double(s, "alpha_mhz", c.alpha / MHz) * MHz;
    c.nu_r = cfg.get_double(s, "nu_r_mhz", c.nu_r / MHz) * MHz;
    c.nu_c = cfg.get_double(s, "nu_c_mhz", l.nu_c / MHz) * MHz;
    if (cfg.has(s, "nu_m_mhz")) {
      c.nu_m.clear();
      for (double f : cfg.get_list(s, "nu_m_mhz", {})) c.nu_m.push_back(f * MHz);
    }
    c.g_qc = cfg.get_double(s, "g_qc_mhz", c.g_qc / MHz) * MHz;
    c.g_qr = cfg.get_double(s, "g_qr_mhz", c.g_qr / MHz) * MHz;
    c.g_qm = cfg.get_double(s, "g_qm_mhz", c.g_qm / MHz) * MHz;
    c.T1 = cfg.get_double(s, "t1_ns", c.T1 / ns) * ns;
    c.T2 = cfg.get_double(s, "t2_ns", c.T2 / ns) * ns;
    p.drive_T1[q] = cfg.get_double(s, "drive_t1_ns", 0.0) * ns;
    p.drive_T2[q] = cfg.get_double(s, "drive_t2_ns", 0.0) * ns;
    try {
      c.validate();
    } catch (const InvalidArgument& e) {
      cfg.fail(s, cfg.has(s, "t2_ns") ? "t2_ns" : "nu_q_mhz", e.what());
    }

    if (cfg.has(s, "dc_eps_mhz") || cfg.has(s, "dc_freq_mhz")) {
      const auto eps = cfg.get_list(s, "dc_eps_mhz", {});
      const auto freq = cfg.get_list(s, "dc_freq_mhz", {});
      if (eps.size() != freq.size()) cfg.fail(s, "dc_freq_mhz", "must have as many entries as dc_eps_mhz");
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < eps.size(); ++k) pts.emplace_back(eps[k] * MHz, freq[k] * MHz);
      try {
        p.dc_maps[q] = DcOffsetMap(std::move(pts));
      } catch (const InvalidArgument& e) {
        cfg.fail(s, "dc_eps_mhz", e.what());
      }
    } else {
      const double shift = cfg.get_double(s, "dc_shift_mhz", 4.0) * MHz;
      const double eps_max = cfg.get_double(s, "dc_eps_max_mhz", 1000.0) * MHz;
      const long n = cfg.get_int(s, "dc_points", 5);
      if (!(eps_max > 0)) cfg.fail(s, "dc_eps_max_mhz", "must be positive");
      if (n < 2) cfg.fail(s, "dc_points", "need at least 2 calibration points");
      p.dc_maps[q] = DcOffsetMap::quadratic(l.nu_c - c.nu_q, shift, 1000.0 * MHz, eps_max, static_cast<int>(n));
    }
  }

  cfg.check_keys("model", {"g_eff_mhz", "include_bright", "coupling_signs", "skew_q2_ns", "dephasing", "loss"});
  p.g_eff = cfg.get_double("model", "g_eff_mhz", p.g_eff / MHz) * MHz;
  if (!(p.g_eff > 0)) cfg.fail("model", "g_eff_mhz", "must be positive");
  p.transfer.include_bright = cfg.get_bool("model", "include_bright", true);
  const std::string signs = cfg.get_string("model", "coupling_signs", "magnitude");
  if (signs == "magnitude")
    p.transfer.coupling = CouplingSign::Magnitude;
  else if (signs == "physical")
    p.transfer.coupling = CouplingSign::Physical;
  else
    cfg.fail("model", "coupling_signs", "expected 'magnitude' or 'physical'");
  p.skew_q2 = cfg.get_double("model", "skew_q2_ns", 0.0) * ns;
  p.dephasing = cfg.get_bool("model", "dephasing", true);
  p.loss = cfg.get_bool("model", "loss", true);

  for (int q = 0; q < 2; ++q) {
    try {
      p.working_amplitude(q);
    } catch (const RangeError& e) {
      cfg.fail("model", "g_eff_mhz", e.what());
    }
  }
  p.validate();
  return p;
}

}  // namespace qlink::model
