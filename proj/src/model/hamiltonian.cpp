#include "qlink/model/hamiltonian.hpp"

#include <cmath>
#include <numbers>

#include "qlink/core/error.hpp"

namespace qlink::model {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_pulses(const std::vector<FluxPulse>& pulses) {
  for (const auto& p : pulses) p.validate();
  for (std::size_t a = 0; a < pulses.size(); ++a)
    for (std::size_t b = a + 1; b < pulses.size(); ++b)
      if (pulses[a].start < pulses[b].end() && pulses[b].start < pulses[a].end())
        throw InvalidArgument("pulses on one qubit must not overlap");
}

const FluxPulse* active_pulse(const std::vector<FluxPulse>& pulses, double t) {
  for (const auto& p : pulses)
    if (p.active(t)) return &p;
  return nullptr;
}

}  // namespace

TimeDependentHamiltonian build_sideband_hamiltonian(const SidebandSystem& system) {
  const std::size_t nq = system.qubits.size();
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (const auto& q : system.qubits) {
    dims.push_back(2);
    labels.push_back(q.label);
  }
  for (const auto& m : system.modes) {
    if (m.levels < 2) throw DimensionError("sideband mode truncation must be >= 2");
    if (m.couplings.size() != nq) throw DimensionError("sideband mode needs one coupling per qubit");
    dims.push_back(m.levels);
    labels.push_back(m.label);
  }
  HilbertSpace space(dims, labels);
  TimeDependentHamiltonian h(space);

  std::vector<Matrix> lowering;
  for (std::size_t j = 0; j < system.modes.size(); ++j) {
    const auto& mode = system.modes[j];
    lowering.push_back(embed(annihilation(mode.levels), space, nq + j).matrix());
    const Matrix n = lowering.back().adjoint() * lowering.back();
    h.add_static(kTwoPi * (mode.frequency - system.frame_frequency) * n);
  }

  for (std::size_t i = 0; i < nq; ++i) {
    const auto& q = system.qubits[i];
    check_pulses(q.pulses);
    for (const auto& p : q.pulses) {
      if (!q.dc_map.empty() && (p.amplitude > q.dc_map.max_eps() || p.amplitude < q.dc_map.min_eps()))
        throw RangeError("pulse amplitude outside the DC-offset calibration of " + q.label);
      h.add_breakpoint(p.start);
      h.add_breakpoint(p.end());
    }
    const Matrix sm = embed(sigma_minus(), space, i).matrix();
    const Matrix sp = sm.adjoint();
    Matrix exchange = Matrix::Zero(space.total_dim(), space.total_dim());
    for (std::size_t j = 0; j < system.modes.size(); ++j) {
      const double g = system.modes[j].couplings[i];
      exchange += cplx(0.0, -g) * (lowering[j] * sp - lowering[j].adjoint() * sm);
    }

    auto nu_eff = [q, ref = system.reference_frequency](double eps) {
      return q.dc_map.empty() ? q.nu_q : ref - q.dc_map.resonance(eps);
    };
    const auto pulses = q.pulses;
    h.add_term(
        exchange,
        [pulses](double t) {
          const FluxPulse* p = active_pulse(pulses, t);
          if (p == nullptr) return 0.0;
          return kTwoPi * std::cyl_bessel_j(1.0, p->envelope(t) / (2.0 * p->frequency));
        },
        q.label + ".exchange");
    h.add_term(
        sp * sm,
        [pulses, nu_eff, frame = system.frame_frequency](double t) {
          const FluxPulse* p = active_pulse(pulses, t);
          if (p == nullptr) return 0.0;
          const double eps = p->track_resonance ? p->amplitude : p->envelope(t);
          return kTwoPi * (nu_eff(eps) + p->frequency - frame);
        },
        q.label + ".detuning");
  }
  return h;
}

TimeDependentHamiltonian build_transfer_hamiltonian(const std::array<DeviceParams, 2>& devices,
                                                    const NormalModeDecomposition& modes,
                                                    const std::array<std::vector<FluxPulse>, 2>& pulses,
                                                    const std::array<DcOffsetMap, 2>& dc_maps,
                                                    const TransferOptions& options) {
  SidebandSystem sys;
  sys.frame_frequency = modes.nu_c;
  sys.reference_frequency = modes.nu_c;
  for (int i = 0; i < 2; ++i) {
    devices[i].validate();
    sys.qubits.push_back({i == 0 ? "q1" : "q2", devices[i].nu_q, dc_maps[i], pulses[i]});
  }
  auto coupling = [&](int q, int j) {
    const double g = modes.couplings[q][j];
    return options.coupling == CouplingSign::Magnitude ? std::abs(g) : g;
  };
  auto add_mode = [&](const std::string& label, int j) {
    sys.modes.push_back({label, modes.frequencies[j], {coupling(0, j), coupling(1, j)}, 2});
  };
  add_mode("dark", modes.dark_index);
  if (options.include_bright) {
    const auto bright = modes.bright_indices();
    add_mode("bright_lo", bright[0]);
    add_mode("bright_hi", bright[1]);
  }
  return build_sideband_hamiltonian(sys);
}

TimeDependentHamiltonian build_lab_frame_hamiltonian(const std::vector<LabQubit>& qubits,
                                                     const std::vector<LabMode>& modes) {
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (const auto& q : qubits) {
    if (q.levels < 2) throw DimensionError("lab frame: qubit truncation must be >= 2");
    dims.push_back(q.levels);
    labels.push_back(q.label);
  }
  for (const auto& m : modes) {
    if (m.levels < 2) throw DimensionError("lab frame: mode truncation must be >= 2");
    if (m.couplings.size() != qubits.size()) throw DimensionError("lab frame: one coupling per qubit");
    dims.push_back(m.levels);
    labels.push_back(m.label);
  }
  HilbertSpace space(dims, labels);
  TimeDependentHamiltonian h(space);
  const int dim = space.total_dim();
  const Matrix id = Matrix::Identity(dim, dim);

  std::vector<Matrix> a;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const auto& q = qubits[i];
    a.push_back(embed(annihilation(q.levels), space, i).matrix());
    const Matrix n = a[i].adjoint() * a[i];
    h.add_static(kTwoPi * q.nu_q * n - kTwoPi * 0.5 * q.alpha * n * (n - id));
    check_pulses(q.pulses);
    for (const auto& p : q.pulses) {
      h.add_breakpoint(p.start);
      h.add_breakpoint(p.end());
    }
    const auto pulses = q.pulses;
    h.add_term(
        n,
        [pulses](double t) {
          const FluxPulse* p = active_pulse(pulses, t);
          if (p == nullptr) return 0.0;
          return kTwoPi * 0.5 * p->envelope(t) * std::cos(kTwoPi * p->frequency * t);
        },
        q.label + ".modulation");
  }
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const auto& m = modes[j];
    const Matrix b = embed(annihilation(m.levels), space, qubits.size() + j).matrix();
    h.add_static(kTwoPi * m.frequency * (b.adjoint() * b));
    for (std::size_t i = 0; i < qubits.size(); ++i)
      h.add_static(kTwoPi * m.couplings[i] * (b + b.adjoint()) * (a[i] + a[i].adjoint()));
  }
  return h;
}

TimeDependentHamiltonian build_lab_frame_hamiltonian(const std::array<DeviceParams, 2>& devices,
                                                     const InterconnectParams& interconnect,
                                                     const std::array<std::vector<FluxPulse>, 2>& pulses,
                                                     int qubit_levels, int mode_levels) {
  const auto modes = diagonalize_interconnect(interconnect, {devices[0].g_qc, devices[1].g_qc});
  std::vector<LabQubit> qs;
  for (int i = 0; i < 2; ++i) {
    devices[i].validate();
    qs.push_back({i == 0 ? "q1" : "q2", devices[i].nu_q, devices[i].alpha, qubit_levels, pulses[i]});
  }
  std::vector<LabMode> ms;
  for (int j = 0; j < 3; ++j)
    ms.push_back({"mode" + std::to_string(j), modes.frequencies[j],
                  {modes.couplings[0][j], modes.couplings[1][j]}, mode_levels});
  return build_lab_frame_hamiltonian(qs, ms);
}

}  // namespace qlink::model
