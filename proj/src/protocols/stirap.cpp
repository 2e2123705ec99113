#include "qlink/protocols/stirap.hpp"

#include <algorithm>

#include "qlink/core/error.hpp"
#include "qlink/core/parallel.hpp"

namespace qlink::protocols {

StirapResult stirap_transfer(const Link& link, int sender_qubit, double sigma, double delta_t, double amplitude,
                             int samples) {
  if (!(sigma > 0)) throw InvalidArgument("stirap_transfer: sigma must be positive");
  if (delta_t < 0) throw InvalidArgument("stirap_transfer: the receiver pulse must not trail the sender");
  const int sender = qubit_index(sender_qubit);
  const int receiver = 1 - sender;
  const double w = model::kGaussianTruncation * sigma;
  PulsePair pulses;
  pulses[receiver].push_back(
      link.gaussian(receiver, amplitude > 0 ? amplitude : link.working_amplitude(receiver), w, sigma));
  pulses[sender].push_back(
      link.gaussian(sender, amplitude > 0 ? amplitude : link.working_amplitude(sender), w + delta_t, sigma));
  const double t0 = std::min({0.0, pulses[0].front().start, pulses[1].front().start});
  const double t1 = std::max(pulses[0].front().end(), pulses[1].front().end());

  const auto h = link.hamiltonian(pulses);
  const auto& space = h.space();
  const auto rho0 = link.basis(space, sender == 0 ? 1 : 0, sender == 1 ? 1 : 0);
  auto obs = link.observables(space);
  // Link occupation = total excitation minus the two qubits.
  const Operator qubits = level_projector(space, space.index_of("q1"), 1) + level_projector(space, space.index_of("q2"), 1);
  obs.push_back({"link", excitation_number(space) - qubits});
  const auto traj = solver::evolve(h, link.channels(space), rho0, solver::linspace(t0, t1, std::max(samples, 2)),
                                   link.solver_options, obs);
  StirapResult r;
  r.fidelity = (sender == 0 ? traj.series("P_ge") : traj.series("P_eg")).back();
  const auto& occ = traj.series("link");
  r.max_link_population = *std::max_element(occ.begin(), occ.end());
  r.end_time = t1;
  return r;
}

StirapScan stirap_scan(const Link& link, int sender, const std::vector<double>& sigmas,
                       const std::vector<double>& delta_ts, double amplitude, int workers) {
  if (sigmas.empty() || delta_ts.empty()) throw InvalidArgument("stirap_scan: empty axis");
  StirapScan s;
  s.sender = sender;
  s.sigmas = sigmas;
  s.delta_ts = delta_ts;
  s.fidelity.assign(sigmas.size(), std::vector<double>(delta_ts.size(), 0.0));
  const std::size_t nd = delta_ts.size();
  parallel_for(sigmas.size() * nd, workers, [&](std::size_t k) {
    s.fidelity[k / nd][k % nd] = stirap_transfer(link, sender, sigmas[k / nd], delta_ts[k % nd], amplitude).fidelity;
  });
  s.best_fidelity = -1;
  for (std::size_t i = 0; i < sigmas.size(); ++i)
    for (std::size_t j = 0; j < nd; ++j)
      if (s.fidelity[i][j] > s.best_fidelity) {
        s.best_fidelity = s.fidelity[i][j];
        s.best_sigma = sigmas[i];
        s.best_delta_t = delta_ts[j];
      }
  return s;
}

}  // namespace qlink::protocols
