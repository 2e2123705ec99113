#include "qlink/opt/gaussian_process.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "qlink/core/error.hpp"
#include "qlink/opt/minimize.hpp"

namespace qlink::opt {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

void check_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() < 2) throw InvalidArgument("GaussianProcess: need at least two observations");
  if (X.cols() < 1) throw InvalidArgument("GaussianProcess: inputs have no dimensions");
  if (y.size() != X.rows()) throw DimensionError("GaussianProcess: X and y differ in length");
  if (!X.allFinite() || !y.allFinite()) throw InvalidArgument("GaussianProcess: non-finite data");
  bool distinct = false;
  for (Eigen::Index i = 1; i < X.rows() && !distinct; ++i) distinct = (X.row(i) - X.row(0)).norm() > 0;
  if (!distinct) throw InvalidArgument("GaussianProcess: inputs are all duplicates");
}

Eigen::MatrixXd se_kernel(const Eigen::MatrixXd& X, const Eigen::VectorXd& length, double signal) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double r2 = ((X.row(i) - X.row(j)).transpose().cwiseQuotient(length)).squaredNorm();
      K(i, j) = K(j, i) = signal * std::exp(-0.5 * r2);
    }
  return K;
}

}  // namespace

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return hyper_.signal * std::exp(-0.5 * (a - b).cwiseQuotient(hyper_.length).squaredNorm());
}

void GaussianProcess::factor() {
  const Eigen::Index n = X_.rows();
  Eigen::MatrixXd K = se_kernel(X_, hyper_.length, hyper_.signal);
  K.diagonal().array() += hyper_.noise;
  jitter_ = 0;
  llt_.compute(K);
  double j = 1e-10 * hyper_.signal;
  while (llt_.info() != Eigen::Success) {
    if (j > 1e-2 * hyper_.signal) throw FitError("GaussianProcess: kernel matrix is not positive definite");
    jitter_ = j;
    Eigen::MatrixXd Kj = K;
    Kj.diagonal().array() += j;
    llt_.compute(Kj);
    j *= 10;
  }
  if (jitter_ > 0) {
    const std::string msg = "GaussianProcess: added jitter " + std::to_string(jitter_) + " to the kernel diagonal";
    if (log) log(msg);
    else std::clog << msg << '\n';
  }
  alpha_ = llt_.solve(y_);
  const Eigen::MatrixXd L = llt_.matrixL();
  nlml_ = 0.5 * y_.dot(alpha_) + L.diagonal().array().log().sum() + 0.5 * n * kLog2Pi;
}

void GaussianProcess::condition(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& hyper) {
  check_data(X, y);
  if (hyper.length.size() != X.cols()) throw DimensionError("GaussianProcess: length scales do not match inputs");
  if (!(hyper.length.array() > 0).all() || !(hyper.signal > 0) || !(hyper.noise >= 0))
    throw InvalidArgument("GaussianProcess: hyperparameters must be positive");
  X_ = X;
  y_mean_ = y.mean();
  const double sd = std::sqrt((y.array() - y_mean_).square().sum() / static_cast<double>(y.size()));
  y_scale_ = sd > 0 ? sd : 1.0;
  y_ = (y.array() - y_mean_) / y_scale_;
  hyper_ = hyper;
  factor();
}

void GaussianProcess::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  check_data(X, y);
  const Eigen::Index d = X.cols(), n = X.rows();
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n));
  const Eigen::VectorXd ys = (y.array() - mean) / (sd > 0 ? sd : 1.0);

  // theta = (log length_1..d, log signal, log noise)
  auto objective = [&](const RVector& th, RVector& grad) -> double {
    const Eigen::VectorXd length = th.head(d).array().exp();
    const double signal = std::exp(th(d)), noise = std::exp(th(d + 1));
    const Eigen::MatrixXd Kse = se_kernel(X, length, signal);
    Eigen::MatrixXd K = Kse;
    K.diagonal().array() += noise;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    grad.setZero(d + 2);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd a = llt.solve(ys);
    const Eigen::MatrixXd L = llt.matrixL();
    const double f = 0.5 * ys.dot(a) + L.diagonal().array().log().sum() + 0.5 * n * kLog2Pi;
    const Eigen::MatrixXd W = llt.solve(Eigen::MatrixXd::Identity(n, n)) - a * a.transpose();
    for (Eigen::Index k = 0; k < d; ++k) {
      double g = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double u = (X(i, k) - X(j, k)) / length(k);
          g += W(i, j) * Kse(i, j) * u * u;
        }
      grad(k) = 0.5 * g;
    }
    grad(d) = 0.5 * (W.cwiseProduct(Kse)).sum();
    grad(d + 1) = 0.5 * noise * W.trace();
    return f;
  };

  RVector lo(d + 2), hi(d + 2);
  lo.head(d).setConstant(std::log(1e-2));
  hi.head(d).setConstant(std::log(10.0));
  lo(d) = std::log(1e-2);
  hi(d) = std::log(1e2);
  lo(d + 1) = std::log(1e-6);
  hi(d + 1) = std::log(1.0);

  MinimizeOptions mo;
  mo.max_iter = 200;
  mo.ftol = 1e-9;
  mo.gtol = 1e-6;
  MinimizeResult best;
  best.f = std::numeric_limits<double>::infinity();
  for (const auto& [l, s, nz] : {std::tuple{0.3, 1.0, 1e-2}, std::tuple{1.0, 1.0, 1e-4}, std::tuple{0.1, 1.0, 1e-3}}) {
    RVector th(d + 2);
    th.head(d).setConstant(std::log(l));
    th(d) = std::log(s);
    th(d + 1) = std::log(nz);
    RVector g;
    if (!std::isfinite(objective(th, g))) continue;
    const auto r = minimize(objective, th, mo, lo, hi);
    if (r.f < best.f) best = r;
  }
  if (!std::isfinite(best.f)) throw FitError("GaussianProcess: marginal likelihood could not be evaluated");
  Hyper h;
  h.length = best.x.head(d).array().exp();
  h.signal = std::exp(best.x(d));
  h.noise = std::exp(best.x(d + 1));
  condition(X, y, h);
}

double GaussianProcess::mean(const Eigen::VectorXd& x) const {
  double m = 0;
  for (Eigen::Index i = 0; i < X_.rows(); ++i) m += alpha_(i) * kernel(x, X_.row(i).transpose());
  return y_mean_ + y_scale_ * m;
}

Eigen::VectorXd GaussianProcess::mean_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  const Eigen::VectorXd l2 = hyper_.length.array().square();
  for (Eigen::Index i = 0; i < X_.rows(); ++i) {
    const Eigen::VectorXd xi = X_.row(i).transpose();
    g -= alpha_(i) * kernel(x, xi) * (x - xi).cwiseQuotient(l2);
  }
  return y_scale_ * g;
}

double GaussianProcess::variance(const Eigen::VectorXd& x) const {
  Eigen::VectorXd k(X_.rows());
  for (Eigen::Index i = 0; i < X_.rows(); ++i) k(i) = kernel(x, X_.row(i).transpose());
  const double v = hyper_.signal - k.dot(llt_.solve(k));
  return std::max(0.0, v) * y_scale_ * y_scale_;
}

}  // namespace qlink::opt
