#include "qlink/tomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qlink/core/parallel.hpp"
#include "qlink/opt/minimize.hpp"

namespace qlink::tomo {

namespace {

const HilbertSpace& two_qubits() {
  static const HilbertSpace s({2, 2}, {"q1", "q2"});
  return s;
}

void require_two_qubits(const Matrix& m, const char* who) {
  if (m.rows() != 4 || m.cols() != 4) throw DimensionError(std::string(who) + ": expects a two-qubit state");
}

std::array<Eigen::Matrix2cd, 4> paulis() {
  std::array<Eigen::Matrix2cd, 4> p;
  p[0] = Eigen::Matrix2cd::Identity();
  p[1] << 0, 1, 1, 0;
  p[2] << 0, cplx(0, -1), cplx(0, 1), 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

Matrix pauli_product(int i, int j) {
  const auto p = paulis();
  return kron(p[i], p[j]);
}

// R^dagger Z R = sign * sigma_k for the Clifford pre-rotations.
std::pair<int, double> measured_pauli(Rotation r) {
  const auto p = paulis();
  const Eigen::Matrix2cd R = rotation_matrix(r);
  const Eigen::Matrix2cd m = R.adjoint() * p[3] * R;
  for (int k = 1; k < 4; ++k) {
    if ((m - p[k]).norm() < 1e-12) return {k, 1.0};
    if ((m + p[k]).norm() < 1e-12) return {k, -1.0};
  }
  throw InvalidArgument("measured_pauli: rotation is not a Clifford pre-rotation");
}

}  // namespace

Eigen::Matrix2cd rotation_matrix(Rotation r) {
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  Eigen::Matrix2cd m;
  switch (r) {
    case Rotation::I: m.setIdentity(); break;
    case Rotation::Yp: m << c, -s, s, c; break;
    case Rotation::Ym: m << c, s, -s, c; break;
    case Rotation::Xp: m << c, cplx(0, -s), cplx(0, -s), c; break;
    case Rotation::Xm: m << c, cplx(0, s), cplx(0, s), c; break;
  }
  return m;
}

std::string TomographySetting::name() const {
  auto one = [](Rotation r) -> std::string {
    switch (r) {
      case Rotation::I: return "I";
      case Rotation::Yp: return "Y+";
      case Rotation::Xp: return "X+";
      case Rotation::Ym: return "Y-";
      case Rotation::Xm: return "X-";
    }
    return "?";
  };
  return one(pre[0]) + "," + one(pre[1]);
}

Matrix TomographySetting::unitary() const {
  return kron(rotation_matrix(pre[0]), rotation_matrix(pre[1]));
}

std::vector<TomographySetting> tomography_settings() {
  std::vector<TomographySetting> out;
  for (const auto& set : {std::array{Rotation::I, Rotation::Yp, Rotation::Xp},
                          std::array{Rotation::I, Rotation::Ym, Rotation::Xm}})
    for (Rotation a : set)
      for (Rotation b : set) {
        TomographySetting s{{a, b}};
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
  return out;
}

Counts simulate_measurement(const DensityMatrix& rho, const TomographySetting& setting, const ReadoutModel& model,
                            std::uint64_t seed) {
  require_two_qubits(rho.matrix(), "simulate_measurement");
  model.validate();
  const Matrix U = setting.unitary();
  const Matrix r = U * rho.matrix() * U.adjoint();
  std::array<double, 4> born;
  for (int j = 0; j < 4; ++j) born[j] = std::max(0.0, r(j, j).real());

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> outcome(born.begin(), born.end());
  std::normal_distribution<double> noise(0.0, model.sigma);
  Counts counts{0, 0, 0, 0};
  for (long k = 0; k < model.shots; ++k) {
    Voltage v = model.centroids[outcome(rng)];
    for (int a = 0; a < 4; ++a) v(a) += noise(rng);
    ++counts[model.classify(v)];
  }
  return counts;
}

std::vector<SettingData> measure_all(const DensityMatrix& rho, const ReadoutModel& model, const ConfusionMatrix& c,
                                     std::uint64_t seed, int workers) {
  const auto settings = tomography_settings();
  std::vector<SettingData> out(settings.size());
  parallel_for(settings.size(), workers, [&](std::size_t i) {
    const auto counts = simulate_measurement(rho, settings[i], model, derive_seed(seed, i));
    out[i] = {settings[i], correct_populations(counts, c)};
  });
  return out;
}

std::vector<SettingData> exact_data(const DensityMatrix& rho) {
  require_two_qubits(rho.matrix(), "exact_data");
  std::vector<SettingData> out;
  for (const auto& s : tomography_settings()) {
    const Matrix U = s.unitary();
    const Matrix r = U * rho.matrix() * U.adjoint();
    out.push_back({s, r.diagonal().real()});
  }
  return out;
}

PauliVector pauli_expectations(const DensityMatrix& rho) {
  require_two_qubits(rho.matrix(), "pauli_expectations");
  PauliVector e{};
  for (int k = 0; k < 16; ++k) e[k] = (pauli_product(k / 4, k % 4) * rho.matrix()).trace().real();
  return e;
}

std::string pauli_label(int index) {
  static const char names[] = "IXYZ";
  return {names[index / 4], names[index % 4]};
}

PauliVector estimate_paulis(const std::vector<SettingData>& data) {
  PauliVector sum{}, n{};
  for (const auto& d : data) {
    const auto [k1, s1] = measured_pauli(d.setting.pre[0]);
    const auto [k2, s2] = measured_pauli(d.setting.pre[1]);
    const auto& p = d.populations;
    // Z(x)I, I(x)Z and Z(x)Z read from the populations of gg, ge, eg, ee.
    const double zi = p(0) + p(1) - p(2) - p(3);
    const double iz = p(0) - p(1) + p(2) - p(3);
    const double zz = p(0) - p(1) - p(2) + p(3);
    sum[4 * k1] += s1 * zi;
    n[4 * k1] += 1;
    sum[k2] += s2 * iz;
    n[k2] += 1;
    sum[4 * k1 + k2] += s1 * s2 * zz;
    n[4 * k1 + k2] += 1;
  }
  PauliVector e{};
  e[0] = 1.0;
  for (int k = 1; k < 16; ++k) {
    if (n[k] == 0) throw InvalidArgument("estimate_paulis: settings do not cover " + pauli_label(k));
    e[k] = sum[k] / n[k];
  }
  return e;
}

Matrix linear_estimate(const PauliVector& c) {
  if (std::abs(c[0] - 1.0) > 1e-9) throw InvalidArgument("linear_estimate: identity coefficient must be 1");
  Matrix m = Matrix::Zero(4, 4);
  for (int k = 0; k < 16; ++k) m += c[k] * pauli_product(k / 4, k % 4);
  m /= 4.0;
  return 0.5 * (m + m.adjoint());
}

DensityMatrix project_physical(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
  if (!(w.sum() > 0)) throw InvalidArgument("project_physical: no positive eigenvalue");
  w /= w.sum();
  Matrix r = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix::trusted(two_qubits(), 0.5 * (r + r.adjoint()));
}

double mle_objective(const Matrix& rho, const std::vector<SettingData>& data) {
  require_two_qubits(rho, "mle_objective");
  double f = 0;
  for (const auto& d : data) {
    const Matrix U = d.setting.unitary();
    const Matrix r = U * rho * U.adjoint();
    for (int j = 0; j < 4; ++j) f += std::pow(r(j, j).real() - d.populations(j), 2);
  }
  return f;
}

namespace {

// 16 reals <-> lower-triangular T: 4 diagonal reals, then (re, im) of the
// 6 strictly lower entries.
Matrix unpack(const opt::RVector& x) {
  Matrix T = Matrix::Zero(4, 4);
  int k = 4;
  for (int i = 0; i < 4; ++i) {
    T(i, i) = x(i);
    for (int j = 0; j < i; ++j, k += 2) T(i, j) = cplx(x(k), x(k + 1));
  }
  return T;
}

opt::RVector pack_cholesky(const Matrix& rho) {
  // Regularise so the factorisation exists for rank-deficient starts.
  const Matrix r = rho + 1e-6 * Matrix::Identity(4, 4);
  // rho = T^dagger T with T lower triangular: factor the reversal.
  Eigen::PermutationMatrix<4> rev;
  rev.indices() << 3, 2, 1, 0;
  const Matrix p = rev * r * rev.transpose();
  Eigen::LLT<Matrix> llt(p);
  const Matrix L = llt.matrixL();  // p = L L^dagger
  // r = (rev^T L rev)(rev^T L^dagger rev); T = rev^T L^dagger rev is lower triangular.
  const Matrix T = rev.transpose() * Matrix(L.adjoint()) * rev;
  opt::RVector x(16);
  int k = 4;
  for (int i = 0; i < 4; ++i) {
    x(i) = T(i, i).real();
    for (int j = 0; j < i; ++j, k += 2) {
      x(k) = T(i, j).real();
      x(k + 1) = T(i, j).imag();
    }
  }
  return x;
}

}  // namespace

MleResult mle_reconstruct(const std::vector<SettingData>& data, const MleOptions& options) {
  if (data.empty()) throw InvalidArgument("mle_reconstruct: no data");
  const DensityMatrix start = project_physical(linear_estimate(estimate_paulis(data)));

  std::vector<Matrix> projectors;  // U^dagger |j><j| U
  std::vector<double> targets;
  for (const auto& d : data) {
    const Matrix U = d.setting.unitary();
    for (int j = 0; j < 4; ++j) {
      projectors.push_back(U.adjoint().col(j) * U.adjoint().col(j).adjoint());
      targets.push_back(d.populations(j));
    }
  }

  auto objective = [&](const opt::RVector& x, opt::RVector& grad) -> double {
    const Matrix T = unpack(x);
    const Matrix A = T.adjoint() * T;
    const double t = A.trace().real();
    grad.setZero(16);
    if (!(t > 0)) return INFINITY;
    const Matrix rho = A / t;
    double f = 0;
    Matrix G = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < projectors.size(); ++k) {
      const double r = (projectors[k] * rho).trace().real() - targets[k];
      f += r * r;
      G += 2.0 * r * projectors[k];
    }
    // d/dA of F(A / Tr A)
    const Matrix Gp = (G - (G * rho).trace().real() * Matrix::Identity(4, 4)) / t;
    const Matrix M = Gp * T.adjoint();  // dF = 2 Re Tr(M dT)
    int k = 4;
    for (int i = 0; i < 4; ++i) {
      grad(i) = 2.0 * M(i, i).real();
      for (int j = 0; j < i; ++j, k += 2) {
        grad(k) = 2.0 * M(j, i).real();
        grad(k + 1) = -2.0 * M(j, i).imag();
      }
    }
    return f;
  };

  opt::MinimizeOptions mo;
  mo.max_iter = options.max_iter;
  mo.ftol = options.ftol;
  mo.gtol = 1e-12;
  const auto res = opt::minimize(objective, pack_cholesky(start.matrix()), mo);

  const Matrix T = unpack(res.x);
  Matrix rho = T.adjoint() * T;
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  MleResult out{DensityMatrix::trusted(two_qubits(), rho), res.f, mle_objective(start.matrix(), data), res.iterations};
  // The fit starts from a regularised copy of the projected estimate; keep
  // whichever of the two fits better.
  if (out.start_objective < out.objective) {
    out.rho = start;
    out.objective = out.start_objective;
  }
  if (!res.converged)
    throw MleNotConverged("mle_reconstruct: no convergence after " + std::to_string(res.iterations) + " iterations",
                          out.rho);
  return out;
}

double clipped_bell_objective(const Matrix& rho) {
  require_two_qubits(rho, "clipped_bell_objective");
  const Eigen::MatrixXd a = rho.cwiseAbs();
  const double v = 0.5 * (std::min(a(1, 1), 0.5) + std::min(a(2, 2), 0.5) + a(1, 2) + a(2, 1));
  return std::clamp(v, 0.0, 1.0);
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("trace_distance: shapes differ");
  const Matrix d = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qlink::tomo
