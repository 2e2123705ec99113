#pragma once

#include <vector>

#include "qlink/protocols/link.hpp"

namespace qlink::protocols {

struct TransferResult {
  int sender = 1;
  std::vector<double> times;
  std::vector<double> P_eg, P_ge, P_gg, P_ee;
  std::vector<double> excitation;  ///< total excitation number including the link
  double peak_fidelity = 0;        ///< max receiver-excited, sender-ground population
  double peak_time = 0;
};

struct TransferSettings {
  int sender = 1;
  std::array<double, 2> eps{0, 0};      ///< per qubit; 0 picks the working amplitude
  std::array<double, 2> length{0, 0};   ///< per qubit
  double delay = 0;                     ///< receiver start relative to the sender
  std::vector<double> times;            ///< sampling grid (defaults to 1 ns steps)
};

/// Sender prepared in |e> at t = 0, then simultaneous square sideband pulses on
/// both qubits.
TransferResult transfer(const Link& link, const TransferSettings& settings);

/// Default pulse length: long enough to pass the first transfer maximum.
double default_transfer_length(const Link& link);

struct ErrorBudget {
  double total = 0;
  double loss_only = 0;       ///< infidelity with dephasing switched off
  double dephasing_only = 0;  ///< infidelity with loss switched off
};

ErrorBudget error_budget(const model::NetworkParams& params, const TransferSettings& settings);

struct DelayScanResult {
  int sender = 1;
  std::vector<double> delays;
  std::vector<double> lengths;
  /// population[d][l]: sender excited population after both pulses.
  std::vector<std::vector<double>> population;
  double center = 0;
};

/// Equal-length square pulses; the receiver starts `delay` after the sender.
double delay_cell(const Link& link, int sender, double delay, double length);
DelayScanResult delay_scan(const Link& link, int sender, const std::vector<double>& delays,
                           const std::vector<double>& lengths, int workers = 1);

/// Grid delay about which the map is most nearly mirror symmetric.
double symmetry_center(const std::vector<double>& delays, const std::vector<std::vector<double>>& map,
                       std::size_t min_pairs = 3);

}  // namespace qlink::protocols
