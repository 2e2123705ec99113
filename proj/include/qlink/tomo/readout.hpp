#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "qlink/core/operators.hpp"

namespace qlink::tomo {

using Voltage = Eigen::Vector4d;  ///< (V_I1, V_Q1, V_I2, V_Q2)
using Counts = std::array<long, 4>;
using ConfusionMatrix = Eigen::Matrix4d;  ///< C(i, j) = P(classified j | prepared i)

/// Gaussian voltage clouds, one per basis state gg, ge, eg, ee (index 2*q1 + q2),
/// sharing an isotropic width. Voltages are in arbitrary units.
struct ReadoutModel {
  std::array<Voltage, 4> centroids;
  double sigma = 0.1;
  long shots = 10000;

  /// Qubit k's level shifts its own I quadrature by one unit.
  static ReadoutModel separated(double sigma, long shots = 10000);

  void validate() const;
  /// Nearest centroid; ties go to the lower index.
  int classify(const Voltage& v) const;
};

/// Tallies `shots` draws from each prepared basis state.
ConfusionMatrix empirical_confusion(const ReadoutModel& model, std::uint64_t seed);

/// 2-norm condition number.
double condition_number(const ConfusionMatrix& c);

/// Checks rows sum to one and entries lie in [0, 1].
void validate_confusion(const ConfusionMatrix& c, double tol = 1e-9);

/// Populations p with counts/shots = C^T p. Throws InvalidArgument when C is
/// singular. The result may contain small negative entries.
Eigen::Vector4d correct_populations(const Counts& counts, const ConfusionMatrix& c);

}  // namespace qlink::tomo
