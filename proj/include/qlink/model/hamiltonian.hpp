#pragma once

#include <array>
#include <string>
#include <vector>

#include "qlink/core/hamiltonian.hpp"
#include "qlink/model/device.hpp"
#include "qlink/model/normal_modes.hpp"
#include "qlink/model/pulses.hpp"

namespace qlink::model {

// ---------------------------------------------------------------------------
// Rotating-frame sideband model (two-level qubits, bosonic modes)

struct SidebandQubit {
  std::string label;
  double nu_q = 0;                 ///< used when dc_map is empty
  DcOffsetMap dc_map;              ///< resonance against the reference frequency
  std::vector<FluxPulse> pulses;   ///< must not overlap in time
};

struct SidebandMode {
  std::string label;
  double frequency = 0;
  std::vector<double> couplings;  ///< one per qubit, Hz
  int levels = 2;
};

/// Qubits are two-level. Modes rotate at `frame_frequency`; a qubit driven at
/// omega sits at nu_q_eff(eps) + omega in the same frame, where
/// nu_q_eff(eps) = reference_frequency - dc_map.resonance(eps).
struct SidebandSystem {
  std::vector<SidebandQubit> qubits;
  std::vector<SidebandMode> modes;
  double frame_frequency = 0;
  double reference_frequency = 0;
};

/// Space (qubits..., modes...). Each driven qubit contributes
/// -i g_j J1(eps(t)/2 omega) (b_j s+ - b_j^dag s-) per mode, plus its
/// detuning from the frame while a pulse is on.
TimeDependentHamiltonian build_sideband_hamiltonian(const SidebandSystem& system);

enum class CouplingSign {
  Magnitude,  ///< |g~| for every qubit-mode pair (the published transfer Hamiltonian)
  Physical,   ///< signed resonator amplitudes of the normal modes
};

struct TransferOptions {
  bool include_bright = true;
  CouplingSign coupling = CouplingSign::Magnitude;
};

/// Two qubits and the hybridised link modes in the frame rotating at nu_c.
/// Subsystems: q1, q2, dark[, bright_lo, bright_hi].
TimeDependentHamiltonian build_transfer_hamiltonian(
    const std::array<DeviceParams, 2>& devices, const NormalModeDecomposition& modes,
    const std::array<std::vector<FluxPulse>, 2>& pulses, const std::array<DcOffsetMap, 2>& dc_maps,
    const TransferOptions& options = {});

// ---------------------------------------------------------------------------
// Laboratory frame (multi-level transmons, counter-rotating terms kept)

struct LabQubit {
  std::string label;
  double nu_q = 0;
  double alpha = 0;
  int levels = 3;
  std::vector<FluxPulse> pulses;
};

struct LabMode {
  std::string label;
  double frequency = 0;
  std::vector<double> couplings;
  int levels = 2;
};

/// nu_q(t) = nu_q + (eps(t)/2) cos(2 pi omega t). The modulation amplitude
/// entering the rotating-frame Bessel factor J1(eps / 2 omega) is the
/// peak-to-peak frequency excursion in this frame.
TimeDependentHamiltonian build_lab_frame_hamiltonian(const std::vector<LabQubit>& qubits,
                                                     const std::vector<LabMode>& modes);

/// Both chips with the three normal modes of the interconnect.
TimeDependentHamiltonian build_lab_frame_hamiltonian(const std::array<DeviceParams, 2>& devices,
                                                     const InterconnectParams& interconnect,
                                                     const std::array<std::vector<FluxPulse>, 2>& pulses,
                                                     int qubit_levels = 3, int mode_levels = 2);

}  // namespace qlink::model
