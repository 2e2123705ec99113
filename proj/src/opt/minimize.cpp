#include "qlink/opt/minimize.hpp"

#include <cmath>

#include "qlink/core/error.hpp"

namespace qlink::opt {

namespace {

struct Box {
  const RVector& lo;
  const RVector& hi;
  bool on() const { return lo.size() > 0; }
  RVector project(RVector x) const {
    if (on()) x = x.cwiseMax(lo).cwiseMin(hi);
    return x;
  }
  // Gradient with components that would push through an active face removed.
  RVector projected_grad(const RVector& x, const RVector& g) const {
    RVector pg = g;
    if (!on()) return pg;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if ((x(i) <= lo(i) && g(i) > 0) || (x(i) >= hi(i) && g(i) < 0)) pg(i) = 0;
    return pg;
  }
};

}  // namespace

MinimizeResult minimize(const Objective& f, RVector x0, const MinimizeOptions& options, const RVector& lower,
                        const RVector& upper) {
  const Eigen::Index n = x0.size();
  if (lower.size() != upper.size() || (lower.size() != 0 && lower.size() != n))
    throw InvalidArgument("minimize: bounds do not match the parameter count");
  if (lower.size() && (lower.array() > upper.array()).any()) throw InvalidArgument("minimize: lower > upper");
  const Box box{lower, upper};

  RVector x = box.project(std::move(x0));
  RVector g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw InvalidArgument("minimize: objective is not finite at the start point");
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);

  MinimizeResult r;
  for (r.iterations = 0; r.iterations < options.max_iter; ++r.iterations) {
    RVector pg = box.projected_grad(x, g);
    if (pg.lpNorm<Eigen::Infinity>() < options.gtol) {
      r.converged = true;
      break;
    }
    RVector d = -H * pg;
    if (box.on())
      for (Eigen::Index i = 0; i < n; ++i)
        if (pg(i) == 0) d(i) = 0;
    if (!(d.dot(pg) < 0)) {
      // Not a descent direction: restart from steepest descent.
      H.setIdentity();
      d = -pg;
    }

    double step = 1.0;
    RVector xn, gn(n);
    double fn = 0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      xn = box.project(x + step * d);
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      r.converged = true;  // no further decrease representable along d
      break;
    }
    const RVector s = xn - x, y = gn - g;
    const double df = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (std::abs(df) < options.ftol) {
      r.converged = true;
      ++r.iterations;
      break;
    }
  }
  r.x = x;
  r.f = fx;
  return r;
}

}  // namespace qlink::opt
