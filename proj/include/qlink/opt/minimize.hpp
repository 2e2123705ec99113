#pragma once

#include <functional>

#include <Eigen/Dense>

namespace qlink::opt {

using RVector = Eigen::VectorXd;

/// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(const RVector& x, RVector& grad)>;

struct MinimizeOptions {
  int max_iter = 1000;
  double ftol = 1e-12;  ///< stop when |f_k - f_{k+1}| < ftol
  double gtol = 1e-8;   ///< stop when the projected gradient's max-norm < gtol
};

struct MinimizeResult {
  RVector x;
  double f = 0;
  int iterations = 0;
  bool converged = false;
};

/// Quasi-Newton descent with BFGS updates and a backtracking Armijo search.
/// With non-empty bounds the iterates are projected onto the box and the
/// direction is zeroed on active faces.
MinimizeResult minimize(const Objective& f, RVector x0, const MinimizeOptions& options = {},
                        const RVector& lower = {}, const RVector& upper = {});

}  // namespace qlink::opt
