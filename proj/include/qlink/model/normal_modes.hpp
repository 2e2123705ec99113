#pragma once

#include <array>

#include <Eigen/Dense>

#include "qlink/model/device.hpp"

namespace qlink::model {

/// Single-excitation eigenmodes of the resonator-cable-resonator system.
///
/// Eigenvector columns are expressed over the bare basis
/// (resonator 1, resonator 2, cable). Each column is signed so that its
/// resonator-1 component is non-negative.
struct NormalModeDecomposition {
  std::array<double, 3> frequencies{};  ///< ascending, Hz
  Eigen::Matrix3d eigenvectors;
  /// couplings[q][j]: qubit q to normal mode j (signed, Hz).
  std::array<std::array<double, 3>, 2> couplings{};
  int dark_index = 1;
  double nu_c = 0;

  /// Bright modes in ascending frequency order.
  std::array<int, 2> bright_indices() const;
  double detuning(int mode) const { return frequencies[mode] - nu_c; }
  double cable_participation(int mode) const { return eigenvectors(2, mode) * eigenvectors(2, mode); }
};

NormalModeDecomposition diagonalize_interconnect(const InterconnectParams& p,
                                                 const std::array<double, 2>& g_qc);

}  // namespace qlink::model
