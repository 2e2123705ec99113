#pragma once

#include <string>
#include <vector>

#include "qlink/model/hamiltonian.hpp"
#include "qlink/protocols/link.hpp"

namespace qlink::protocols {

struct ChevronResult {
  std::vector<double> frequencies;  ///< modulation frequency, Hz
  std::vector<double> lengths;      ///< pulse length, s
  std::vector<std::vector<double>> population;  ///< [frequency][length], qubit P_e
  std::vector<std::string> modes;   ///< modes that were simulated
  std::string warning;              ///< non-empty when no mode lies in range
};

struct ChevronOptions {
  /// Spectator readout / memory modes and normal modes are simulated only if
  /// their sideband resonance lies within this distance of the scanned range.
  double mode_cutoff = 100e6;
  bool include_spectators = true;
  int workers = 1;
};

/// Candidate modes for a chevron of qubit q (0-based) at amplitude eps:
/// the three normal modes, its readout resonator and its memory modes.
struct ChevronMode {
  model::SidebandMode mode;
  double kappa = 0;
  double t2 = 0;
  double sideband = 0;  ///< resonant modulation frequency at eps
};
std::vector<ChevronMode> chevron_modes(const Link& link, int q, double eps, double f_lo, double f_hi,
                                       const ChevronOptions& options);

/// P_e(length) at one modulation frequency.
std::vector<double> chevron_column(const Link& link, int q, const std::vector<ChevronMode>& modes, double eps,
                                   double frequency, const std::vector<double>& lengths);

ChevronResult chevron_scan(const Link& link, int qubit, double f_lo, double f_hi, int n_freq, double max_length,
                           int n_len, double eps = 0, const ChevronOptions& options = {});

}  // namespace qlink::protocols
