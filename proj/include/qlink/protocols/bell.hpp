#pragma once

#include <optional>

#include "qlink/protocols/link.hpp"

namespace qlink::protocols {

struct BellParams {
  double eps1 = 0;  ///< 0 picks the working amplitude
  double eps2 = 0;
  double len1 = 0;  ///< sender (qubit 1) pulse, s
  double len2 = 0;  ///< receiver (qubit 2) pulse, s
  double delay = 0; ///< receiver start relative to the sender
};

struct BellResult {
  DensityMatrix rho;       ///< two-qubit state after the phase correction
  DensityMatrix raw;       ///< before the phase correction
  double fidelity = 0;     ///< <Psi+|rho|Psi+>
  double phase = 0;        ///< z rotation applied to qubit 2, rad
  BellParams params;
};

/// |Psi+> = (|ge> + |eg>)/sqrt(2) in the basis index 2*q1 + q2.
Vector psi_plus();

/// Qubit 1 starts in |e>; it is sent half-way into the dark mode while qubit 2
/// absorbs from it. The link modes are traced out and qubit 2 rotated by
/// `phase`, or by the fidelity-maximising phase when none is given.
BellResult bell_protocol(const Link& link, const BellParams& params, std::optional<double> phase = std::nullopt);

/// Nominal sqrt(iSWAP) / iSWAP lengths at the working rate.
BellParams nominal_bell_params(const Link& link);

/// Applies exp(i phase |e><e|) on qubit 2 of a two-qubit state.
DensityMatrix apply_phase(const DensityMatrix& rho, double phase);
/// Phase that maximises <Psi+|rho|Psi+>.
double optimal_phase(const DensityMatrix& rho);

}  // namespace qlink::protocols
