#include "qlink/protocols/chevron.hpp"

#include <cmath>

#include "qlink/core/error.hpp"
#include "qlink/core/parallel.hpp"

namespace qlink::protocols {

std::vector<ChevronMode> chevron_modes(const Link& link, int q, double eps, double f_lo, double f_hi,
                                       const ChevronOptions& options) {
  const auto& p = link.params();
  const auto& nm = link.modes();
  // Effective qubit frequency while modulated.
  const double nu_eff = p.link.nu_c - p.dc_maps[q].resonance(eps);
  std::vector<ChevronMode> all;
  const char* names[3] = {"mode_lo", "mode_mid", "mode_hi"};
  for (int j = 0; j < 3; ++j) {
    ChevronMode m;
    m.mode = {j == nm.dark_index ? std::string("dark") : std::string(names[j]), nm.frequencies[j],
              {std::abs(nm.couplings[q][j])}, 2};
    m.kappa = j == nm.dark_index ? p.link.kappa_dark : p.link.kappa_bright;
    m.t2 = j == nm.dark_index ? p.link.dark_T2 : 0.0;
    all.push_back(m);
  }
  if (options.include_spectators) {
    const auto& chip = p.chips[q];
    all.push_back({{"readout", chip.nu_r, {chip.g_qr}, 2}, 0.0, 0.0, 0.0});
    for (std::size_t k = 0; k < chip.nu_m.size(); ++k)
      all.push_back({{"memory" + std::to_string(k), chip.nu_m[k], {chip.g_qm}, 2}, 0.0, 0.0, 0.0});
  }
  std::vector<ChevronMode> kept;
  for (auto& m : all) {
    m.sideband = m.mode.frequency - nu_eff;
    if (m.sideband > f_lo - options.mode_cutoff && m.sideband < f_hi + options.mode_cutoff) kept.push_back(m);
  }
  return kept;
}

std::vector<double> chevron_column(const Link& link, int q, const std::vector<ChevronMode>& modes, double eps,
                                   double frequency, const std::vector<double>& lengths) {
  const auto& p = link.params();
  model::SidebandSystem sys;
  sys.reference_frequency = p.link.nu_c;
  const double nu_eff = p.link.nu_c - p.dc_maps[q].resonance(eps);
  sys.frame_frequency = nu_eff + frequency;
  const double t_end = lengths.back();
  sys.qubits.push_back({"q", p.chips[q].nu_q, p.dc_maps[q], {model::FluxPulse::square(eps, frequency, 0.0, t_end * 1.001)}});
  for (const auto& m : modes) sys.modes.push_back(m.mode);
  const auto h = model::build_sideband_hamiltonian(sys);
  const auto& space = h.space();

  std::vector<solver::CollapseChannel> channels = link.qubit_channels(space, 0, q);
  for (std::size_t k = 0; k < modes.size(); ++k)
    for (auto& c : link.mode_channels(space, k + 1, modes[k].kappa, modes[k].t2)) channels.push_back(std::move(c));

  std::vector<int> levels(space.size(), 0);
  levels[0] = 1;
  const auto rho0 = DensityMatrix::pure(space, basis_state(space, levels));
  std::vector<double> times = lengths;
  const bool prepend = times.front() > 0;
  if (prepend) times.insert(times.begin(), 0.0);
  auto traj = solver::evolve(h, channels, rho0, times, link.solver_options, {{"pe", level_projector(space, 0, 1)}});
  auto pe = traj.series("pe");
  if (prepend) pe.erase(pe.begin());
  return pe;
}

ChevronResult chevron_scan(const Link& link, int qubit, double f_lo, double f_hi, int n_freq, double max_length,
                           int n_len, double eps, const ChevronOptions& options) {
  const int q = qubit_index(qubit);
  if (!(f_hi > f_lo) || n_freq < 1 || n_len < 2 || !(max_length > 0))
    throw InvalidArgument("chevron_scan: invalid axes");
  if (!(eps > 0)) eps = link.working_amplitude(q);
  ChevronResult r;
  r.frequencies = n_freq == 1 ? std::vector<double>{f_lo} : solver::linspace(f_lo, f_hi, n_freq);
  r.lengths = solver::linspace(0.0, max_length, n_len);
  const auto modes = chevron_modes(link, q, eps, f_lo, f_hi, options);
  for (const auto& m : modes) r.modes.push_back(m.mode.label);
  if (modes.empty()) {
    r.warning = "frequency range contains no mode within the cutoff; returning a flat map";
    r.population.assign(r.frequencies.size(), std::vector<double>(r.lengths.size(), 1.0));
    return r;
  }
  r.population.resize(r.frequencies.size());
  parallel_for(r.frequencies.size(), options.workers, [&](std::size_t k) {
    r.population[k] = chevron_column(link, q, modes, eps, r.frequencies[k], r.lengths);
  });
  return r;
}

}  // namespace qlink::protocols
