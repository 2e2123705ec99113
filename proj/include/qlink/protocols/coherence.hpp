#pragma once

#include <string>
#include <vector>

#include "qlink/protocols/link.hpp"

namespace qlink::protocols {

enum class ProbeKind { T1, Ramsey };

struct ExpFit {
  double amplitude = 0;
  double constant = 0;  ///< decay time, s
};

/// Least-squares fit of log(y) = log(A) - x / tau. Throws FitError when fewer
/// than three positive points remain or the data do not decay.
ExpFit fit_exponential(const std::vector<double>& x, const std::vector<double>& y);

struct ProbeResult {
  ProbeKind kind = ProbeKind::T1;
  std::string target;
  std::vector<double> waits;
  std::vector<double> signal;  ///< qubit P_e (T1) or |rho_ge| (Ramsey)
  ExpFit fit;
};

/// Swaps an excitation (T1) or a superposition (Ramsey) from `qubit` into the
/// target normal mode ("dark", "bright_lo", "bright_hi") with an iSWAP,
/// waits, swaps it back and reads the qubit. `rate` is the sideband rate of
/// the swaps (0 = the working rate); slower swaps leak less into the
/// neighbouring normal modes.
ProbeResult mode_coherence_probe(const Link& link, ProbeKind kind, const std::string& target,
                                 const std::vector<double>& waits, int qubit = 1, double rate = 0);

}  // namespace qlink::protocols
