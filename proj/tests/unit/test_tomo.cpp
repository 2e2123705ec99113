#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qlink/opt/minimize.hpp"
#include "qlink/tomo/tomography.hpp"

using namespace qlink;
using namespace qlink::tomo;

namespace {

const HilbertSpace kTwo({2, 2}, {"q1", "q2"});

DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix g(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(n(rng), n(rng));
  Matrix r = g * g.adjoint();
  return DensityMatrix(kTwo, r / r.trace().real());
}

DensityMatrix bell_state() {
  Vector v = Vector::Zero(4);
  v(1) = v(2) = 1 / std::sqrt(2.0);
  return DensityMatrix::pure(kTwo, v);
}

// Per-qubit misassignment of two unit-separated clouds split at the midpoint.
double tail(double sigma) { return 0.5 * std::erfc(0.5 / (sigma * std::sqrt(2.0))); }

}  // namespace

TEST_CASE("minimize: Rosenbrock and a bounded quadratic") {
  opt::Objective rosen = [](const opt::RVector& x, opt::RVector& g) {
    g.resize(2);
    g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    g(1) = 200 * (x(1) - x(0) * x(0));
    return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2);
  };
  opt::MinimizeOptions o;
  o.max_iter = 5000;
  o.ftol = 0;
  const auto r = opt::minimize(rosen, opt::RVector::Constant(2, -1.2), o);
  CHECK(r.converged);
  CHECK(std::abs(r.x(0) - 1) < 1e-5);
  CHECK(std::abs(r.x(1) - 1) < 1e-5);

  opt::Objective quad = [](const opt::RVector& x, opt::RVector& g) {
    g = 2 * (x - opt::RVector::Constant(3, 2.0));
    return (x.array() - 2.0).square().sum();
  };
  const auto b = opt::minimize(quad, opt::RVector::Zero(3), o, opt::RVector::Constant(3, -1), opt::RVector::Constant(3, 1));
  CHECK((b.x - opt::RVector::Constant(3, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(opt::minimize(quad, opt::RVector::Zero(3), o, opt::RVector::Zero(2), opt::RVector::Zero(2)),
                  InvalidArgument);
}

TEST_CASE("settings: seventeen distinct pre-rotation pairs") {
  const auto s = tomography_settings();
  CHECK(s.size() == 17);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) CHECK_FALSE(s[i] == s[j]);
  for (const auto& t : s) {
    const Matrix U = t.unitary();
    CHECK((U * U.adjoint() - Matrix::Identity(4, 4)).norm() < 1e-12);
  }
}

TEST_CASE("readout: classification and sampling") {
  const auto model = ReadoutModel::separated(0.1, 20000);
  CHECK(model.classify(Voltage(0.1, 0, 0.9, 0)) == 1);
  CHECK(model.classify(Voltage(1.2, 3, 0.2, -3)) == 2);
  const auto c = simulate_measurement(DensityMatrix::pure(kTwo, basis_state(kTwo, {0, 0})), tomography_settings()[0],
                                      model, 3);
  CHECK(c[0] >= 0.99 * model.shots);

  // Almost noiseless readout: frequencies follow the Born rule.
  std::mt19937_64 rng(11);
  const auto rho = random_state(rng);
  const auto tight = ReadoutModel::separated(1e-3, 40000);
  for (const auto& s : tomography_settings()) {
    const auto counts = simulate_measurement(rho, s, tight, 5);
    const Matrix U = s.unitary();
    const Matrix r = U * rho.matrix() * U.adjoint();
    for (int j = 0; j < 4; ++j) {
      const double p = r(j, j).real();
      const double err = std::sqrt(p * (1 - p) / tight.shots);
      CHECK(std::abs(static_cast<double>(counts[j]) / tight.shots - p) <= 4 * err + 1e-12);
    }
  }
  CHECK(simulate_measurement(rho, tomography_settings()[4], model, 9) ==
        simulate_measurement(rho, tomography_settings()[4], model, 9));
}

TEST_CASE("readout: empirical confusion against the Gaussian tail integral") {
  const double sigma = 0.35;
  const auto model = ReadoutModel::separated(sigma, 50000);
  const auto c = empirical_confusion(model, 21);
  validate_confusion(c);
  const double e = tail(sigma);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int flips = ((i >> 1) != (j >> 1)) + ((i & 1) != (j & 1));
      const double p = std::pow(e, flips) * std::pow(1 - e, 2 - flips);
      const double err = std::sqrt(p * (1 - p) / model.shots);
      CHECK(std::abs(c(i, j) - p) <= 2 * err);
    }
  CHECK(condition_number(c) > 1.0);
}

TEST_CASE("correct_populations") {
  const Counts counts{4000, 3000, 2000, 1000};
  const auto raw = correct_populations(counts, ConfusionMatrix::Identity());
  CHECK((raw - Eigen::Vector4d(0.4, 0.3, 0.2, 0.1)).norm() < 1e-15);

  ConfusionMatrix c;
  c << 0.90, 0.04, 0.05, 0.01,
       0.06, 0.88, 0.01, 0.05,
       0.07, 0.01, 0.87, 0.05,
       0.01, 0.06, 0.05, 0.88;
  validate_confusion(c);
  const Eigen::Vector4d p(0.1, 0.45, 0.35, 0.1);
  const Eigen::Vector4d f = c.transpose() * p;
  Counts exact;
  for (int j = 0; j < 4; ++j) exact[j] = std::lround(f(j) * 1e8);
  CHECK((correct_populations(exact, c) - p).norm() < 1e-8);
  const auto noisy = correct_populations({1234, 4321, 3000, 1445}, c);
  CHECK(std::abs(noisy.sum() - 1.0) < 1e-9);

  ConfusionMatrix singular = ConfusionMatrix::Constant(0.25);
  CHECK_THROWS_AS(correct_populations(counts, singular), InvalidArgument);
  ConfusionMatrix bad = c;
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(validate_confusion(bad), InvalidArgument);
}

TEST_CASE("linear estimate: Bell signature, maximally mixed, random round trip") {
  PauliVector e{};
  e[0] = 1;
  e[4 * 1 + 1] = 1;   // XX
  e[4 * 2 + 2] = 1;   // YY
  e[4 * 3 + 3] = -1;  // ZZ
  CHECK((linear_estimate(e) - bell_state().matrix()).norm() < 1e-12);

  PauliVector id{};
  id[0] = 1;
  CHECK((linear_estimate(id) - Matrix::Identity(4, 4) / 4.0).norm() < 1e-15);
  PauliVector bad{};
  CHECK_THROWS_AS(linear_estimate(bad), InvalidArgument);

  // Expectations taken directly from the operator algebra, independent of the
  // estimator's own Pauli table.
  const Matrix sig[4] = {Matrix::Identity(2, 2), pauli_x().matrix(), pauli_y().matrix(), pauli_z().matrix()};
  std::mt19937_64 rng(5);
  for (int n = 0; n < 10; ++n) {
    const auto rho = random_state(rng);
    PauliVector c{};
    for (int k = 0; k < 16; ++k) c[k] = (kron(sig[k / 4], sig[k % 4]) * rho.matrix()).trace().real();
    CHECK((linear_estimate(c) - rho.matrix()).norm() < 1e-9);
    const auto viaSettings = estimate_paulis(exact_data(rho));
    for (int k = 0; k < 16; ++k) CHECK(std::abs(viaSettings[k] - c[k]) < 1e-12);
  }
}

TEST_CASE("mle: noiseless Bell data") {
  const auto r = mle_reconstruct(exact_data(bell_state()));
  CHECK(state_fidelity(r.rho, bell_state().matrix().col(1) * std::sqrt(2.0)) >= 1 - 1e-6);
  CHECK(r.objective <= r.start_objective);
}

TEST_CASE("mle: maximally mixed state at 1e5 shots") {
  const auto model = ReadoutModel::separated(0.2, 100000);
  const auto c = empirical_confusion(model, 1);
  const auto data = measure_all(DensityMatrix::maximally_mixed(kTwo), model, c, 2);
  const auto r = mle_reconstruct(data);
  CHECK(trace_distance(r.rho.matrix(), Matrix::Identity(4, 4) / 4.0) < 0.01);
}

TEST_CASE("mle: output is physical and never worse than its start") {
  std::mt19937_64 rng(17);
  const auto model = ReadoutModel::separated(0.4, 200);
  const auto c = empirical_confusion(ReadoutModel::separated(0.4, 20000), 3);
  for (int n = 0; n < 20; ++n) {
    const auto rho = random_state(rng);
    const auto data = measure_all(rho, model, c, 100 + n);
    const auto r = mle_reconstruct(data);
    CHECK(std::abs(r.rho.trace() - 1) < 1e-9);
    CHECK(r.rho.min_eigenvalue() > -1e-9);
    CHECK(r.rho.hermiticity_error() < 1e-12);
    CHECK(r.objective <= r.start_objective + 1e-15);
    CHECK(std::abs(mle_objective(r.rho.matrix(), data) - r.objective) < 1e-9);
  }
}

TEST_CASE("mle: iteration cap raises with the best state attached") {
  std::mt19937_64 rng(2);
  const auto data = measure_all(random_state(rng), ReadoutModel::separated(0.3, 500),
                                empirical_confusion(ReadoutModel::separated(0.3, 5000), 4), 8);
  MleOptions o;
  o.max_iter = 1;
  o.ftol = 0;
  try {
    mle_reconstruct(data, o);
    FAIL("expected MleNotConverged");
  } catch (const MleNotConverged& e) {
    CHECK(std::abs(e.best().trace() - 1) < 1e-9);
  }
}

TEST_CASE("measurement is reproducible and worker-count independent") {
  std::mt19937_64 rng(8);
  const auto rho = random_state(rng);
  const auto model = ReadoutModel::separated(0.3, 3000);
  const ConfusionMatrix c = ConfusionMatrix::Identity();
  const auto a = measure_all(rho, model, c, 77, 1);
  const auto b = measure_all(rho, model, c, 77, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].populations == b[i].populations);
}

TEST_CASE("tomography round trip with 5% readout error") {
  const double sigma = 0.5 / 1.6448536269514722;  // per-qubit error 0.05
  CHECK(tail(sigma) == doctest::Approx(0.05).epsilon(1e-9));
  const auto model = ReadoutModel::separated(sigma, 10000);
  const auto c = empirical_confusion(ReadoutModel::separated(sigma, 100000), 99);
  std::mt19937_64 rng(2024);
  std::vector<double> dist;
  for (int n = 0; n < 10; ++n) {
    const auto rho = random_state(rng);
    dist.push_back(trace_distance(mle_reconstruct(measure_all(rho, model, c, n)).rho.matrix(), rho.matrix()));
  }
  std::sort(dist.begin(), dist.end());
  CHECK(0.5 * (dist[4] + dist[5]) < 0.03);
}

TEST_CASE("clipped Bell objective") {
  CHECK(clipped_bell_objective(bell_state().matrix()) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix r = Matrix::Zero(4, 4);
  r(2, 2) = 0.6;
  r(1, 1) = 0.4;
  r(1, 2) = r(2, 1) = 0.45;
  CHECK(clipped_bell_objective(r) == doctest::Approx(0.5 * (0.4 + 0.5) + 0.45).epsilon(1e-12));
  // A negative coherence counts with its magnitude, so the objective can
  // exceed the plain fidelity.
  Matrix m = bell_state().matrix();
  m(1, 2) = m(2, 1) = -0.5;
  CHECK(state_fidelity(DensityMatrix::trusted(kTwo, m), bell_state().matrix().col(1) * std::sqrt(2.0)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(clipped_bell_objective(m) == doctest::Approx(1.0));
  // Without any element past the bounds the two agree for a real positive coherence.
  Matrix w = 0.5 * bell_state().matrix() + 0.125 * Matrix::Identity(4, 4);
  CHECK(clipped_bell_objective(w) ==
        doctest::Approx(state_fidelity(DensityMatrix::trusted(kTwo, w), bell_state().matrix().col(1) * std::sqrt(2.0))));
}
