#include "qlink/protocols/coherence.hpp"

#include <cmath>

#include "qlink/core/error.hpp"
#include "qlink/model/hamiltonian.hpp"

namespace qlink::protocols {

ExpFit fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw FitError("fit_exponential: x and y differ in length");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(y[k] > 0) || !std::isfinite(y[k])) continue;
    const double ly = std::log(y[k]);
    sx += x[k];
    sy += ly;
    sxx += x[k] * x[k];
    sxy += x[k] * ly;
    ++n;
  }
  if (n < 3) throw FitError("fit_exponential: fewer than three positive samples");
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw FitError("fit_exponential: degenerate abscissae");
  const double slope = (n * sxy - sx * sy) / den;
  const double icept = (sy - slope * sx) / n;
  if (!(slope < 0)) throw FitError("fit_exponential: signal does not decay");
  return {std::exp(icept), -1.0 / slope};
}

ProbeResult mode_coherence_probe(const Link& link, ProbeKind kind, const std::string& target,
                                 const std::vector<double>& waits, int qubit, double rate) {
  const int q = qubit_index(qubit);
  const auto& p = link.params();
  const auto& nm = link.modes();
  const auto bright = nm.bright_indices();
  int j = -1;
  if (target == "dark") j = nm.dark_index;
  else if (target == "bright_lo") j = bright[0];
  else if (target == "bright_hi") j = bright[1];
  else throw InvalidArgument("mode_coherence_probe: unknown target '" + target + "'");
  if (waits.size() < 3) throw InvalidArgument("mode_coherence_probe: need at least three waits");

  if (!(rate > 0)) rate = p.g_eff;
  const double eps = p.amplitude_for(q, rate, j);
  const double omega = p.sideband_frequency(q, eps, j);
  const double t_swap = 1.0 / (4.0 * rate);

  ProbeResult r;
  r.kind = kind;
  r.target = target;
  r.waits = waits;
  for (double wait : waits) {
    if (wait < 0) throw InvalidArgument("mode_coherence_probe: negative wait");
    model::SidebandSystem sys;
    sys.reference_frequency = p.link.nu_c;
    sys.frame_frequency = nm.frequencies[j];
    sys.qubits.push_back({"q", p.chips[q].nu_q, p.dc_maps[q],
                          {model::FluxPulse::square(eps, omega, 0.0, t_swap),
                           model::FluxPulse::square(eps, omega, t_swap + wait, t_swap)}});
    const std::string labels[3] = {"m0", "m1", "m2"};
    for (int k = 0; k < 3; ++k) sys.modes.push_back({labels[k], nm.frequencies[k], {std::abs(nm.couplings[q][k])}, 2});
    const auto h = model::build_sideband_hamiltonian(sys);
    const auto& space = h.space();
    auto channels = link.qubit_channels(space, 0, q);
    for (int k = 0; k < 3; ++k) {
      const bool dark = k == nm.dark_index;
      for (auto& c : link.mode_channels(space, k + 1, dark ? p.link.kappa_dark : p.link.kappa_bright,
                                        dark ? p.link.dark_T2 : 0.0))
        channels.push_back(std::move(c));
    }
    Vector psi = Vector::Zero(space.total_dim());
    if (kind == ProbeKind::T1) {
      psi(space.index({1, 0, 0, 0})) = 1.0;
    } else {
      psi(space.index({0, 0, 0, 0})) = psi(space.index({1, 0, 0, 0})) = 1.0 / std::sqrt(2.0);
    }
    const double t_end = 2.0 * t_swap + wait;
    const auto traj = solver::evolve(h, channels, DensityMatrix::pure(space, psi), {0.0, t_end}, link.solver_options);
    const auto qubit_state = partial_trace(*traj.final_state, {0});
    r.signal.push_back(kind == ProbeKind::T1 ? qubit_state.matrix()(1, 1).real()
                                             : std::abs(qubit_state.matrix()(0, 1)));
  }
  r.fit = fit_exponential(waits, r.signal);
  return r;
}

}  // namespace qlink::protocols
