#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qlink/core/error.hpp"
#include "qlink/core/operators.hpp"
#include "qlink/tomo/readout.hpp"

namespace qlink::tomo {

/// Single-qubit pre-rotation before readout.
enum class Rotation { I, Yp, Xp, Ym, Xm };  // Y/X(+pi/2), Y/X(-pi/2)

struct TomographySetting {
  std::array<Rotation, 2> pre{Rotation::I, Rotation::I};  ///< qubit 1, qubit 2
  std::string name() const;
  /// R1 (x) R2 in the basis index 2*q1 + q2.
  Matrix unitary() const;
  bool operator==(const TomographySetting&) const = default;
};

Eigen::Matrix2cd rotation_matrix(Rotation r);

/// {I, Y+, X+}^2 and {I, Y-, X-}^2 with I(x)I once: 17 settings.
std::vector<TomographySetting> tomography_settings();

/// Rotates, samples a basis outcome from the Born rule, draws a voltage from
/// that outcome's cloud and classifies it; `model.shots` times.
Counts simulate_measurement(const DensityMatrix& rho, const TomographySetting& setting, const ReadoutModel& model,
                            std::uint64_t seed);

struct SettingData {
  TomographySetting setting;
  Eigen::Vector4d populations;  ///< corrected, may be slightly negative
};

/// Measures every setting (seeds derived per setting) and corrects with C.
std::vector<SettingData> measure_all(const DensityMatrix& rho, const ReadoutModel& model, const ConfusionMatrix& c,
                                     std::uint64_t seed, int workers = 1);

/// Noise-free populations diag(U rho U^dagger) for every setting.
std::vector<SettingData> exact_data(const DensityMatrix& rho);

/// Two-qubit Pauli expectations, index 4*i + j over {I, X, Y, Z} on qubits 1, 2.
using PauliVector = std::array<double, 16>;
PauliVector pauli_expectations(const DensityMatrix& rho);
/// Averages every Pauli product the settings give access to (all 16).
PauliVector estimate_paulis(const std::vector<SettingData>& data);
std::string pauli_label(int index);

/// sum_ij c_ij sigma_i (x) sigma_j / 4. Hermitian with unit trace, not
/// necessarily positive. Requires c_II = 1.
Matrix linear_estimate(const PauliVector& expectations);

/// Zeroes negative eigenvalues and renormalises.
DensityMatrix project_physical(const Matrix& m);

/// sum_i sum_j (<j|U_i rho U_i^dagger|j> - P_ij)^2
double mle_objective(const Matrix& rho, const std::vector<SettingData>& data);

struct MleOptions {
  int max_iter = 10000;
  double ftol = 1e-10;
};

struct MleResult {
  DensityMatrix rho;
  double objective = 0;
  double start_objective = 0;  ///< objective of the projected linear estimate
  int iterations = 0;
};

/// Raised when the likelihood search runs out of iterations.
class MleNotConverged : public FitError {
 public:
  MleNotConverged(const std::string& what, DensityMatrix best) : FitError(what), best_(std::move(best)) {}
  const DensityMatrix& best() const { return best_; }

 private:
  DensityMatrix best_;
};

/// Least-squares fit over rho = T^dagger T / Tr(T^dagger T), T lower
/// triangular, started from the projected linear estimate.
MleResult mle_reconstruct(const std::vector<SettingData>& data, const MleOptions& options = {});

/// |rho| elementwise, diagonal clipped at 0.5, then <Psi+|.|Psi+>, limited
/// to [0, 1]. Optimiser objective only.
double clipped_bell_objective(const Matrix& rho);

double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace qlink::tomo
