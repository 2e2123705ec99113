#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlink::opt {

/// Squared-exponential kernel with one length scale per input dimension plus
/// white observation noise. Inputs are expected in the unit cube; targets are
/// standardised internally and reported back in their own units.
class GaussianProcess {
 public:
  struct Hyper {
    Eigen::VectorXd length;  ///< per dimension, unit-cube units
    double signal = 1.0;     ///< signal variance of the standardised targets
    double noise = 1e-4;     ///< noise variance of the standardised targets
  };

  /// Called with a message whenever jitter has to be added.
  std::function<void(const std::string&)> log;

  /// Fits the hyperparameters by maximising the marginal likelihood
  /// (multi-start quasi-Newton in log space), then conditions on the data.
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
  /// Conditions on the data with fixed hyperparameters.
  void condition(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& hyper);

  double mean(const Eigen::VectorXd& x) const;
  Eigen::VectorXd mean_gradient(const Eigen::VectorXd& x) const;
  double variance(const Eigen::VectorXd& x) const;  ///< latent, without noise
  /// Prior variance in target units.
  double signal_variance() const { return hyper_.signal * y_scale_ * y_scale_; }
  double noise_variance() const { return hyper_.noise * y_scale_ * y_scale_; }

  const Hyper& hyper() const { return hyper_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return static_cast<std::size_t>(X_.rows()); }
  const Eigen::MatrixXd& inputs() const { return X_; }
  /// Negative log marginal likelihood of the standardised data.
  double nlml() const { return nlml_; }

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  void factor();

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;  ///< standardised
  double y_mean_ = 0, y_scale_ = 1;
  Hyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0;
  double nlml_ = 0;
};

}  // namespace qlink::opt
