#pragma once

#include <vector>

namespace qlink::model {

/// Static parameters of one processor chip. Frequencies in Hz, times in s.
struct DeviceParams {
  double nu_q = 0;   ///< qubit static frequency
  double alpha = 0;  ///< anharmonicity magnitude (e-f sits alpha below g-e)
  double nu_r = 0;   ///< readout resonator
  double nu_c = 0;   ///< communication resonator
  std::vector<double> nu_m;  ///< memory modes
  double g_qc = 0;   ///< qubit-communication resonator coupling
  double g_qr = 0;   ///< qubit-readout coupling (spectator chevrons only)
  double g_qm = 0;   ///< qubit-memory coupling (spectator chevrons only)
  double T1 = 0;
  double T2 = 0;     ///< Ramsey dephasing time

  /// Throws InvalidArgument on non-positive frequencies or T2 > 2 T1.
  void validate() const;
};

/// Two identical communication resonators coupled to one cable mode.
struct InterconnectParams {
  double nu_c = 0;          ///< communication resonator frequency
  double delta = 0;         ///< cable detuning nu_l - nu_c (signed)
  double g_l = 0;           ///< resonator-cable coupling
  double kappa_bright = 0;  ///< energy decay rate of each bright mode (1/s)
  double kappa_dark = 0;    ///< energy decay rate of the dark mode (1/s)
  double dark_T2 = 0;       ///< dark-mode Ramsey time; 0 means no pure dephasing
  double mismatch = 0;      ///< nu_{2,c} - nu_{1,c}

  void validate() const;
  double nu_l() const { return nu_c + delta; }
};

DeviceParams default_chip(int index);  // index 0 or 1
InterconnectParams default_interconnect();

}  // namespace qlink::model
