#include "qlink/protocols/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlink/core/error.hpp"
#include "qlink/core/parallel.hpp"

namespace qlink::protocols {

double default_transfer_length(const Link& link) {
  return 1.0 / (std::sqrt(2.0) * link.params().g_eff);
}

TransferResult transfer(const Link& link, const TransferSettings& s) {
  const int sender = qubit_index(s.sender);
  const int receiver = 1 - sender;
  PulsePair pulses;
  for (int q = 0; q < 2; ++q) {
    const double eps = s.eps[q] > 0 ? s.eps[q] : link.working_amplitude(q);
    const double len = s.length[q] > 0 ? s.length[q] : default_transfer_length(link);
    const double start = q == receiver ? s.delay : 0.0;
    pulses[q].push_back(link.square(q, eps, start, len));
  }
  double t0 = 0.0, t1 = 0.0;
  for (const auto& p : pulses) {
    t0 = std::min(t0, p.front().start);
    t1 = std::max(t1, p.front().end());
  }
  std::vector<double> times = s.times;
  if (times.empty()) {
    const int n = std::max(2, static_cast<int>(std::lround((t1 - t0) / 1e-9)) + 1);
    times = solver::linspace(t0, t1, n);
  }

  const auto h = link.hamiltonian(pulses);
  const auto& space = h.space();
  const auto rho0 = link.basis(space, sender == 0 ? 1 : 0, sender == 1 ? 1 : 0);
  const auto traj = solver::evolve(h, link.channels(space), rho0, times, link.solver_options, link.observables(space));

  TransferResult r;
  r.sender = s.sender;
  r.times = times;
  r.P_eg = traj.series("P_eg");
  r.P_ge = traj.series("P_ge");
  r.P_gg = traj.series("P_gg");
  r.P_ee = traj.series("P_ee");
  r.excitation = traj.series("n");
  const auto& success = sender == 0 ? r.P_ge : r.P_eg;
  const auto it = std::max_element(success.begin(), success.end());
  r.peak_fidelity = *it;
  r.peak_time = times[static_cast<std::size_t>(it - success.begin())];
  return r;
}

ErrorBudget error_budget(const model::NetworkParams& params, const TransferSettings& settings) {
  ErrorBudget b;
  b.total = 1.0 - transfer(Link(params), settings).peak_fidelity;
  auto p = params;
  p.dephasing = false;
  p.loss = true;
  b.loss_only = 1.0 - transfer(Link(p), settings).peak_fidelity;
  p.dephasing = true;
  p.loss = false;
  b.dephasing_only = 1.0 - transfer(Link(p), settings).peak_fidelity;
  return b;
}

double delay_cell(const Link& link, int sender_qubit, double delay, double length) {
  const int sender = qubit_index(sender_qubit);
  const int receiver = 1 - sender;
  PulsePair pulses;
  for (int q = 0; q < 2; ++q)
    pulses[q].push_back(link.square(q, link.working_amplitude(q), q == receiver ? delay : 0.0, length));
  const double t0 = std::min({0.0, pulses[0].front().start, pulses[1].front().start});
  const double t1 = std::max(pulses[0].front().end(), pulses[1].front().end());
  const auto h = link.hamiltonian(pulses);
  const auto& space = h.space();
  const auto rho0 = link.basis(space, sender == 0 ? 1 : 0, sender == 1 ? 1 : 0);
  const auto obs = level_projector(space, space.index_of(sender == 0 ? "q1" : "q2"), 1);
  const auto traj = solver::evolve(h, link.channels(space), rho0, {t0, t1}, link.solver_options, {{"pe", obs}});
  return traj.series("pe").back();
}

DelayScanResult delay_scan(const Link& link, int sender, const std::vector<double>& delays,
                           const std::vector<double>& lengths, int workers) {
  if (delays.empty() || lengths.empty()) throw InvalidArgument("delay_scan: empty axis");
  DelayScanResult r;
  r.sender = sender;
  r.delays = delays;
  r.lengths = lengths;
  r.population.assign(delays.size(), std::vector<double>(lengths.size(), 0.0));
  const std::size_t nl = lengths.size();
  parallel_for(delays.size() * nl, workers, [&](std::size_t k) {
    r.population[k / nl][k % nl] = delay_cell(link, sender, delays[k / nl], lengths[k % nl]);
  });
  r.center = symmetry_center(delays, r.population);
  return r;
}

double symmetry_center(const std::vector<double>& delays, const std::vector<std::vector<double>>& map,
                       std::size_t min_pairs) {
  if (delays.size() != map.size() || delays.size() < 3) throw InvalidArgument("symmetry_center: need >= 3 delays");
  const double step = delays[1] - delays[0];
  for (std::size_t k = 1; k < delays.size(); ++k)
    if (std::abs(delays[k] - delays[k - 1] - step) > 1e-6 * std::abs(step))
      throw InvalidArgument("symmetry_center: delays must be evenly spaced");

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_c = delays.size() / 2;
  for (std::size_t c = 0; c < delays.size(); ++c) {
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t k = 1; c >= k && c + k < delays.size(); ++k) {
      for (std::size_t l = 0; l < map[c].size(); ++l) {
        const double d = map[c - k][l] - map[c + k][l];
        sum += d * d;
      }
      ++pairs;
    }
    if (pairs < min_pairs) continue;
    const double score = sum / static_cast<double>(pairs);
    if (score < best) {
      best = score;
      best_c = c;
    }
  }
  if (!std::isfinite(best)) throw InvalidArgument("symmetry_center: delay axis too short");
  return delays[best_c];
}

}  // namespace qlink::protocols
