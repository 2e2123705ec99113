#include "qlink/protocols/link.hpp"

#include <algorithm>
#include <cmath>

#include "qlink/core/error.hpp"

namespace qlink::protocols {

int qubit_index(int qubit) {
  if (qubit != 1 && qubit != 2) throw InvalidArgument("qubit number must be 1 or 2");
  return qubit - 1;
}

Operator level_projector(const HilbertSpace& space, std::size_t index, int level) {
  const int d = space.dim(index);
  Matrix p = Matrix::Zero(d, d);
  p(level, level) = 1.0;
  return embed(Operator(HilbertSpace::single(d), p), space, index);
}

Operator excitation_number(const HilbertSpace& space) {
  Matrix n = Matrix::Zero(space.total_dim(), space.total_dim());
  for (std::size_t k = 0; k < space.size(); ++k) n += embed(number(space.dim(k)), space, k).matrix();
  return {space, n};
}

Link::Link(model::NetworkParams params) : params_(std::move(params)) {
  params_.validate();
  modes_ = params_.modes();
  for (int q = 0; q < 2; ++q) amplitude_[q] = params_.working_amplitude(q);
  solver_options.store_states = false;
}

double Link::dark_frequency(int q, double eps) const {
  return params_.sideband_frequency(q, eps, modes_.dark_index);
}

FluxPulse Link::square(int q, double eps, double start, double length) const {
  const double skew = q == 1 ? params_.skew_q2 : 0.0;
  return FluxPulse::square(eps, dark_frequency(q, eps), start + skew, length);
}

FluxPulse Link::gaussian(int q, double eps, double center, double sigma) const {
  const double skew = q == 1 ? params_.skew_q2 : 0.0;
  auto p = FluxPulse::gaussian(eps, dark_frequency(q, eps), center + skew, sigma);
  p.track_resonance = true;
  return p;
}

TimeDependentHamiltonian Link::hamiltonian(const PulsePair& pulses) const {
  return model::build_transfer_hamiltonian(params_.chips, modes_, pulses, params_.dc_maps, params_.transfer);
}

std::vector<solver::CollapseChannel> Link::qubit_channels(const HilbertSpace& space, std::size_t index,
                                                          int q) const {
  std::vector<solver::CollapseChannel> out;
  const double T1 = params_.qubit_T1(q), T2 = params_.qubit_T2(q);
  const std::string& label = space.labels()[index];
  if (params_.loss) out.push_back({embed(sigma_minus(), space, index), 1.0 / T1, label + ".relax"});
  const double gphi = solver::dephasing_rate(T1, T2);
  if (params_.dephasing && gphi > 0) out.push_back({embed(pauli_z(), space, index), gphi, label + ".dephase"});
  return out;
}

std::vector<solver::CollapseChannel> Link::mode_channels(const HilbertSpace& space, std::size_t index, double kappa,
                                                         double t2) const {
  std::vector<solver::CollapseChannel> out;
  const int d = space.dim(index);
  const std::string& label = space.labels()[index];
  if (params_.loss && kappa > 0) out.push_back({embed(annihilation(d), space, index), kappa, label + ".relax"});
  if (params_.dephasing && t2 > 0) {
    const double t1 = kappa > 0 ? 1.0 / kappa : INFINITY;
    const double gphi = solver::dephasing_rate(t1, t2);
    if (gphi > 0) {
      Matrix z = Matrix::Identity(d, d) - 2.0 * number(d).matrix();
      out.push_back({embed(Operator(HilbertSpace::single(d), z), space, index), gphi, label + ".dephase"});
    }
  }
  return out;
}

std::vector<solver::CollapseChannel> Link::channels(const HilbertSpace& space) const {
  std::vector<solver::CollapseChannel> out;
  auto append = [&](std::vector<solver::CollapseChannel> v) {
    for (auto& c : v) out.push_back(std::move(c));
  };
  append(qubit_channels(space, space.index_of("q1"), 0));
  append(qubit_channels(space, space.index_of("q2"), 1));
  append(mode_channels(space, space.index_of("dark"), params_.link.kappa_dark, params_.link.dark_T2));
  for (const char* b : {"bright_lo", "bright_hi"}) {
    const auto& labels = space.labels();
    if (std::find(labels.begin(), labels.end(), b) != labels.end())
      append(mode_channels(space, space.index_of(b), params_.link.kappa_bright, 0.0));
  }
  return out;
}

DensityMatrix Link::basis(const HilbertSpace& space, int q1, int q2) const {
  std::vector<int> levels(space.size(), 0);
  levels[space.index_of("q1")] = q1;
  levels[space.index_of("q2")] = q2;
  return DensityMatrix::pure(space, basis_state(space, levels));
}

std::vector<solver::Observable> Link::observables(const HilbertSpace& space) const {
  const std::size_t i1 = space.index_of("q1"), i2 = space.index_of("q2");
  std::vector<solver::Observable> out;
  const char* names[2][2] = {{"P_gg", "P_ge"}, {"P_eg", "P_ee"}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.push_back({names[a][b], level_projector(space, i1, a) * level_projector(space, i2, b)});
  out.push_back({"n", excitation_number(space)});
  return out;
}

}  // namespace qlink::protocols
