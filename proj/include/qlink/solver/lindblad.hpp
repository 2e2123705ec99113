#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlink/core/hamiltonian.hpp"
#include "qlink/core/operators.hpp"

namespace qlink::solver {

/// rate * D[op], D[L]rho = L rho L^dag - {L^dag L, rho}/2. Rate in 1/s.
struct CollapseChannel {
  Operator op;
  double rate = 0;
  std::string label;
};

struct SolverOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0;  ///< s; 0 means unbounded
  long max_steps = 5'000'000;
  bool store_states = true;
  /// Evolve only on the computational-basis states reachable from rho0 under
  /// H and the jump operators. Exact; saves a lot for number-conserving models.
  bool reduce_to_reachable = true;
};

struct Observable {
  std::string name;
  Operator op;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;  ///< empty unless store_states
  std::map<std::string, std::vector<double>> observables;  ///< real part of Tr(O rho)
  std::optional<DensityMatrix> final_state;
  long steps = 0;
  int reduced_dim = 0;

  const std::vector<double>& series(const std::string& name) const;
};

/// Integrates d rho/dt = -i[H(t), rho] + sum_k rate_k D[L_k] rho over `times`
/// (times[0] is the initial time). Adaptive Dormand-Prince 5(4); the
/// integrator restarts at every breakpoint declared by H.
Trajectory evolve(const TimeDependentHamiltonian& h, const std::vector<CollapseChannel>& channels,
                  const DensityMatrix& rho0, const std::vector<double>& times, const SolverOptions& options = {},
                  const std::vector<Observable>& observables = {});

/// Relaxation (lowering operator, rate 1/T1) and pure dephasing
/// (Z = I - 2n, rate (1/T2 - 1/2T1)/2) on subsystem `target`, so that
/// off-diagonals decay at exactly 1/T2. Infinite times give no channel.
std::vector<CollapseChannel> channels_from_coherence(double T1, double T2, const HilbertSpace& space,
                                                     std::size_t target);

double dephasing_rate(double T1, double T2);

/// Equally spaced grid with n points from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, int n);

}  // namespace qlink::solver
