#include "qlink/protocols/bell.hpp"

#include <algorithm>
#include <cmath>

#include "qlink/core/error.hpp"

namespace qlink::protocols {

Vector psi_plus() {
  Vector v = Vector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

DensityMatrix apply_phase(const DensityMatrix& rho, double phase) {
  if (rho.dim() != 4) throw DimensionError("apply_phase: expects a two-qubit state");
  Vector u(4);
  const cplx e = std::polar(1.0, phase);
  u << 1.0, e, 1.0, e;
  Matrix m = u.asDiagonal() * rho.matrix() * u.conjugate().asDiagonal();
  return DensityMatrix::trusted(rho.space(), m);
}

double optimal_phase(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw DimensionError("optimal_phase: expects a two-qubit state");
  // F = (rho_11 + rho_22)/2 + Re(e^{i phi} rho_12)
  return -std::arg(rho.matrix()(1, 2));
}

BellParams nominal_bell_params(const Link& link) {
  BellParams p;
  p.eps1 = link.working_amplitude(0);
  p.eps2 = link.working_amplitude(1);
  p.len1 = 1.0 / (8.0 * link.params().g_eff);
  p.len2 = 1.0 / (4.0 * link.params().g_eff);
  return p;
}

BellResult bell_protocol(const Link& link, const BellParams& params, std::optional<double> phase) {
  if (!(params.len1 > 0) || !(params.len2 > 0)) throw InvalidArgument("bell_protocol: pulse lengths must be positive");
  BellParams used = params;
  if (!(used.eps1 > 0)) used.eps1 = link.working_amplitude(0);
  if (!(used.eps2 > 0)) used.eps2 = link.working_amplitude(1);
  PulsePair pulses;
  pulses[0].push_back(link.square(0, used.eps1, 0.0, used.len1));
  pulses[1].push_back(link.square(1, used.eps2, used.delay, used.len2));
  const double t0 = std::min({0.0, pulses[0].front().start, pulses[1].front().start});
  const double t1 = std::max(pulses[0].front().end(), pulses[1].front().end());

  const auto h = link.hamiltonian(pulses);
  const auto& space = h.space();
  const auto traj = solver::evolve(h, link.channels(space), link.basis(space, 1, 0), {t0, t1}, link.solver_options);
  auto raw = partial_trace(*traj.final_state, {space.index_of("q1"), space.index_of("q2")});
  // Symmetrise away integrator roundoff before the state is handed on.
  raw = DensityMatrix::trusted(raw.space(), 0.5 * (raw.matrix() + raw.matrix().adjoint()));

  const double phi = phase ? *phase : optimal_phase(raw);
  auto rho = apply_phase(raw, phi);
  const double f = state_fidelity(rho, psi_plus());
  return {rho, raw, f, phi, used};
}

}  // namespace qlink::protocols
