#pragma once

#include <array>

#include "qlink/model/config.hpp"
#include "qlink/model/device.hpp"
#include "qlink/model/hamiltonian.hpp"
#include "qlink/model/normal_modes.hpp"
#include "qlink/model/pulses.hpp"

namespace qlink::model {

/// Everything needed to simulate the two-chip link.
struct NetworkParams {
  std::array<DeviceParams, 2> chips;
  InterconnectParams link;
  std::array<DcOffsetMap, 2> dc_maps;

  double g_eff = 2e6;  ///< dark-mode sideband rate at the working amplitude, Hz
  TransferOptions transfer;
  double skew_q2 = 0;  ///< extra delay of qubit 2's flux line, s

  /// Coherence during the sideband drive; 0 keeps the static table value.
  std::array<double, 2> drive_T1{0, 0};
  std::array<double, 2> drive_T2{0, 0};

  // Error-budget switches.
  bool dephasing = true;
  bool loss = true;

  void validate() const;
  NormalModeDecomposition modes() const;
  double qubit_T1(int q) const { return drive_T1[q] > 0 ? drive_T1[q] : chips[q].T1; }
  double qubit_T2(int q) const { return drive_T2[q] > 0 ? drive_T2[q] : chips[q].T2; }

  /// Modulation amplitude that gives `rate` on normal mode `mode` (the dark
  /// mode when negative), with the modulation frequency following the
  /// DC-offset map.
  double amplitude_for(int q, double rate, int mode = -1) const;
  double working_amplitude(int q) const { return amplitude_for(q, g_eff); }
  /// Modulation frequency that puts qubit q on resonance with the dark mode.
  double resonant_frequency(int q, double eps) const { return dc_maps[q].resonance(eps); }
  /// Same for an arbitrary normal mode.
  double sideband_frequency(int q, double eps, int mode) const;
  /// Sideband rate on normal mode `mode` (dark when negative) at amplitude eps.
  double dark_rate(int q, double eps, int mode = -1) const;
};

/// Quadratic DC offset of 4 MHz at 1 GHz amplitude, 5 calibration points.
DcOffsetMap default_dc_map(const DeviceParams& chip, double nu_c);

NetworkParams default_network();

/// Reads sections [chip1], [chip2], [interconnect] and [model] on top of the
/// defaults. Unknown keys in those sections are rejected.
NetworkParams network_from_config(const Config& cfg);

/// Sections consumed by network_from_config.
inline const char* const kNetworkSections[] = {"chip1", "chip2", "interconnect", "model"};

}  // namespace qlink::model
