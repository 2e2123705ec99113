#include "qlink/model/normal_modes.hpp"

#include <cmath>

namespace qlink::model {

std::array<int, 2> NormalModeDecomposition::bright_indices() const {
  std::array<int, 2> out{};
  int k = 0;
  for (int j = 0; j < 3; ++j)
    if (j != dark_index) out[k++] = j;
  return out;
}

NormalModeDecomposition diagonalize_interconnect(const InterconnectParams& p,
                                                 const std::array<double, 2>& g_qc) {
  p.validate();
  // Single-excitation coupling matrix relative to nu_c.
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(1, 1) = p.mismatch;
  m(2, 2) = p.delta;
  m(0, 2) = m(2, 0) = p.g_l;
  m(1, 2) = m(2, 1) = p.g_l;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  NormalModeDecomposition out;
  out.nu_c = p.nu_c;
  out.eigenvectors = es.eigenvectors();
  for (int j = 0; j < 3; ++j) {
    out.frequencies[j] = p.nu_c + es.eigenvalues()(j);
    auto col = out.eigenvectors.col(j);
    const double pivot = std::abs(col(0)) > 1e-12 ? col(0) : col(2);
    if (pivot < 0) col = -col;
  }

  // Dark mode: smallest cable participation.
  int dark = 0;
  for (int j = 1; j < 3; ++j)
    if (std::abs(out.eigenvectors(2, j)) < std::abs(out.eigenvectors(2, dark))) dark = j;
  out.dark_index = dark;

  for (int q = 0; q < 2; ++q)
    for (int j = 0; j < 3; ++j) out.couplings[q][j] = g_qc[q] * out.eigenvectors(q, j);
  return out;
}

}  // namespace qlink::model
