#include "qlink/core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlink/core/error.hpp"

namespace qlink {

HilbertSpace::HilbertSpace(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw DimensionError("HilbertSpace: no subsystems");
  if (dims_.size() != labels_.size())
    throw DimensionError("HilbertSpace: dims and labels differ in length");
  long total = 1;
  for (int d : dims_) {
    if (d < 2) throw DimensionError("HilbertSpace: subsystem dimension must be >= 2");
    total *= d;
    if (total > kMaxTotalDim) {
      std::ostringstream msg;
      msg << "HilbertSpace: total dimension exceeds " << kMaxTotalDim;
      throw DimensionError(msg.str());
    }
  }
  total_ = static_cast<int>(total);
}

HilbertSpace HilbertSpace::single(int dim, std::string label) {
  return HilbertSpace({dim}, {std::move(label)});
}

std::size_t HilbertSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidArgument("HilbertSpace: no subsystem '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<int> HilbertSpace::digits(int index) const {
  std::vector<int> out(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    out[k] = index % dims_[k];
    index /= dims_[k];
  }
  return out;
}

int HilbertSpace::index(const std::vector<int>& digits) const {
  if (digits.size() != dims_.size()) throw DimensionError("HilbertSpace::index: wrong digit count");
  int idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims_[k])
      throw DimensionError("HilbertSpace::index: level out of range");
    idx = idx * dims_[k] + digits[k];
  }
  return idx;
}

Operator::Operator(HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim())
    throw DimensionError("Operator: matrix shape does not match space");
}

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {
void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": operands live on different spaces");
}
}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator+");
  return {a.space_, a.matrix_ + b.matrix_};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator-");
  return {a.space_, a.matrix_ - b.matrix_};
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "operator*");
  return {a.space_, a.matrix_ * b.matrix_};
}

Operator operator*(cplx s, const Operator& a) { return {a.space_, s * a.matrix_}; }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

DensityMatrix::DensityMatrix(Unchecked, HilbertSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim())
    throw DimensionError("DensityMatrix: matrix shape does not match space");
}

DensityMatrix::DensityMatrix(HilbertSpace space, Matrix matrix, double tol)
    : DensityMatrix(Unchecked{}, std::move(space), std::move(matrix)) {
  if (hermiticity_error() > tol) throw InvalidArgument("DensityMatrix: not Hermitian");
  if (std::abs(trace() - 1.0) > tol || std::abs(matrix_.trace().imag()) > tol)
    throw InvalidArgument("DensityMatrix: trace differs from one");
  if (min_eigenvalue() < -tol) throw InvalidArgument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::trusted(HilbertSpace space, Matrix matrix) {
  return DensityMatrix(Unchecked{}, std::move(space), std::move(matrix));
}

DensityMatrix DensityMatrix::pure(HilbertSpace space, const Vector& psi) {
  if (psi.size() != space.total_dim()) throw DimensionError("DensityMatrix::pure: wrong length");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw InvalidArgument("DensityMatrix::pure: not normalised");
  return DensityMatrix(std::move(space), psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(HilbertSpace space) {
  const int n = space.total_dim();
  Matrix m = Matrix::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(std::move(space), std::move(m));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Operator annihilation(int dim) {
  if (dim < 2) throw DimensionError("annihilation: dimension must be >= 2");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {HilbertSpace::single(dim), m};
}

Operator number(int dim) {
  Operator a = annihilation(dim);
  return a.adjoint() * a;
}

Operator identity(const HilbertSpace& space) {
  const int n = space.total_dim();
  return {space, Matrix::Identity(n, n)};
}

namespace {
Operator qubit_op(cplx a00, cplx a01, cplx a10, cplx a11) {
  Matrix m(2, 2);
  m << a00, a01, a10, a11;
  return {HilbertSpace::single(2), m};
}
}  // namespace

Operator sigma_minus() { return qubit_op(0, 1, 0, 0); }
Operator sigma_plus() { return qubit_op(0, 0, 1, 0); }
Operator pauli_x() { return qubit_op(0, 1, 1, 0); }
Operator pauli_y() { return qubit_op(0, cplx(0, -1), cplx(0, 1), 0); }
Operator pauli_z() { return qubit_op(1, 0, 0, -1); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator embed(const Operator& op, const HilbertSpace& space, std::size_t index) {
  if (index >= space.size()) throw DimensionError("embed: subsystem index out of range");
  if (op.dim() != space.dim(index)) throw DimensionError("embed: operator dimension mismatch");
  int left = 1;
  int right = 1;
  for (std::size_t k = 0; k < index; ++k) left *= space.dim(k);
  for (std::size_t k = index + 1; k < space.size(); ++k) right *= space.dim(k);
  Matrix m = kron(kron(Matrix::Identity(left, left), op.matrix()), Matrix::Identity(right, right));
  return {space, std::move(m)};
}

cplx expect(const Operator& op, const DensityMatrix& rho) {
  require_same_space(op.space(), rho.space(), "expect");
  // Tr(A B) = sum_ij A_ij B_ji
  return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<std::size_t> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  const HilbertSpace& full = rho.space();
  for (std::size_t k : keep)
    if (k >= full.size()) throw InvalidArgument("partial_trace: subsystem index out of range");

  std::vector<int> dims;
  std::vector<std::string> labels;
  for (std::size_t k : keep) {
    dims.push_back(full.dim(k));
    labels.push_back(full.labels()[k]);
  }
  HilbertSpace reduced(dims, labels);

  std::vector<bool> kept(full.size(), false);
  for (std::size_t k : keep) kept[k] = true;

  // Split every full index into (kept index, traced index).
  const int n = full.total_dim();
  std::vector<int> kept_idx(n), traced_idx(n);
  for (int i = 0; i < n; ++i) {
    auto d = full.digits(i);
    int ki = 0, ti = 0;
    for (std::size_t s = 0; s < full.size(); ++s) {
      if (kept[s]) ki = ki * full.dim(s) + d[s];
      else ti = ti * full.dim(s) + d[s];
    }
    kept_idx[i] = ki;
    traced_idx[i] = ti;
  }

  Matrix out = Matrix::Zero(reduced.total_dim(), reduced.total_dim());
  const Matrix& m = rho.matrix();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (traced_idx[r] == traced_idx[c]) out(kept_idx[r], kept_idx[c]) += m(r, c);
  return DensityMatrix::trusted(std::move(reduced), std::move(out));
}

double state_fidelity(const DensityMatrix& rho, const Vector& psi) {
  if (psi.size() != rho.dim()) throw DimensionError("state_fidelity: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw InvalidArgument("state_fidelity: psi not normalised");
  double f = psi.dot(rho.matrix() * psi).real();
  if (f < 0.0 && f > -1e-9) f = 0.0;
  if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
  return f;
}

Vector basis_state(const HilbertSpace& space, const std::vector<int>& levels) {
  Vector v = Vector::Zero(space.total_dim());
  v(space.index(levels)) = 1.0;
  return v;
}

}  // namespace qlink
