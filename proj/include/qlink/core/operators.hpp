#pragma once

// Dense complex operator algebra on truncated tensor-product Hilbert spaces.
//
// Basis convention: level 0 is the ground state (|g> for qubits, vacuum for
// modes). Composite basis indices are row-major over subsystems, i.e. the
// first subsystem is the most significant digit.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlink {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxTotalDim = 4096;

class HilbertSpace {
 public:
  HilbertSpace(std::vector<int> dims, std::vector<std::string> labels);

  static HilbertSpace single(int dim, std::string label = "s0");

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return dims_.size(); }
  int dim(std::size_t index) const { return dims_.at(index); }
  int total_dim() const { return total_; }

  /// Position of the subsystem with the given label; throws if absent.
  std::size_t index_of(const std::string& label) const;

  /// Per-subsystem levels of a composite basis index.
  std::vector<int> digits(int index) const;
  int index(const std::vector<int>& digits) const;

  bool operator==(const HilbertSpace& other) const {
    return dims_ == other.dims_ && labels_ == other.labels_;
  }

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  int total_ = 1;
};

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return space_.total_dim(); }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }
  bool is_hermitian(double tol = 1e-9) const;

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);

class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity to within `tol`.
  DensityMatrix(HilbertSpace space, Matrix matrix, double tol = 1e-9);

  /// Wraps a matrix without validation (integrator output, estimators).
  static DensityMatrix trusted(HilbertSpace space, Matrix matrix);
  static DensityMatrix pure(HilbertSpace space, const Vector& psi);
  static DensityMatrix maximally_mixed(HilbertSpace space);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return space_.total_dim(); }

  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  /// max |rho - rho^dagger| over elements.
  double hermiticity_error() const;

 private:
  struct Unchecked {};
  DensityMatrix(Unchecked, HilbertSpace space, Matrix matrix);

  HilbertSpace space_;
  Matrix matrix_;
};

/// Lowering operator with sqrt(n) on the first superdiagonal.
Operator annihilation(int dim);
Operator number(int dim);
Operator identity(const HilbertSpace& space);

// Two-level operators in the {|g>, |e>} basis.
Operator sigma_minus();
Operator sigma_plus();
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();

Matrix kron(const Matrix& a, const Matrix& b);

/// Places a single-subsystem operator at position `index` of `space`.
Operator embed(const Operator& op, const HilbertSpace& space, std::size_t index);

/// Tr(op rho).
cplx expect(const Operator& op, const DensityMatrix& rho);

/// Reduced state on the kept subsystems, in ascending subsystem order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep);

/// <psi|rho|psi> for a normalised pure state.
double state_fidelity(const DensityMatrix& rho, const Vector& psi);

/// Computational basis vector for per-subsystem levels.
Vector basis_state(const HilbertSpace& space, const std::vector<int>& levels);

}  // namespace qlink
