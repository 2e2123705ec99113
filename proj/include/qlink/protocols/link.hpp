#pragma once

#include <array>
#include <string>
#include <vector>

#include "qlink/core/hamiltonian.hpp"
#include "qlink/model/network.hpp"
#include "qlink/solver/lindblad.hpp"

namespace qlink::protocols {

using model::FluxPulse;
using PulsePair = std::array<std::vector<FluxPulse>, 2>;

/// Simulation handle for the two-chip link: pulse construction, the transfer
/// Hamiltonian, dissipators and standard observables. Qubits are numbered 1
/// and 2 in the protocol functions and 0 and 1 here.
class Link {
 public:
  explicit Link(model::NetworkParams params);

  const model::NetworkParams& params() const { return params_; }
  const model::NormalModeDecomposition& modes() const { return modes_; }

  double working_amplitude(int q) const { return amplitude_[q]; }
  /// Modulation frequency that resonates qubit q with the dark mode at amplitude eps.
  double dark_frequency(int q, double eps) const;

  /// Square sideband pulse on the dark mode. `start` is the programmed time;
  /// qubit 2 additionally picks up the hardware skew.
  FluxPulse square(int q, double eps, double start, double length) const;
  /// Truncated Gaussian on the dark mode, chirped to stay on resonance.
  FluxPulse gaussian(int q, double eps, double center, double sigma) const;

  TimeDependentHamiltonian hamiltonian(const PulsePair& pulses) const;
  std::vector<solver::CollapseChannel> channels(const HilbertSpace& space) const;

  /// Qubits in the given levels, every link mode in vacuum.
  DensityMatrix basis(const HilbertSpace& space, int q1, int q2) const;
  /// P_gg, P_ge, P_eg, P_ee (first letter is qubit 1) and total excitation "n".
  std::vector<solver::Observable> observables(const HilbertSpace& space) const;

  solver::SolverOptions solver_options;

  // Dissipator helpers honouring the loss / dephasing switches.
  std::vector<solver::CollapseChannel> qubit_channels(const HilbertSpace& space, std::size_t index, int q) const;
  std::vector<solver::CollapseChannel> mode_channels(const HilbertSpace& space, std::size_t index, double kappa,
                                                     double t2) const;

 private:
  model::NetworkParams params_;
  model::NormalModeDecomposition modes_;
  std::array<double, 2> amplitude_{};
};

/// Projector onto one level of subsystem `index`.
Operator level_projector(const HilbertSpace& space, std::size_t index, int level);
/// Sum of number operators over all subsystems.
Operator excitation_number(const HilbertSpace& space);

/// Validates a 1-based qubit number and returns the 0-based index.
int qubit_index(int qubit);

}  // namespace qlink::protocols
