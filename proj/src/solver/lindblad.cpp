#include "qlink/solver/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "qlink/core/error.hpp"

namespace qlink::solver {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;  // interleaved re/im of a column-major n x n matrix
using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Computational-basis states reachable from the support of rho0.
std::vector<int> reachable_states(const TimeDependentHamiltonian& h, const std::vector<CollapseChannel>& channels,
                                  const Matrix& rho0) {
  const int n = static_cast<int>(rho0.rows());
  std::vector<const Matrix*> ops{&h.static_part()};
  for (const auto& term : h.terms()) ops.push_back(&term.op);
  std::vector<Matrix> decay;
  for (const auto& c : channels) {
    ops.push_back(&c.op.matrix());
    decay.push_back(c.op.matrix().adjoint() * c.op.matrix());
  }
  for (const auto& d : decay) ops.push_back(&d);

  std::vector<char> seen(n, 0);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (rho0(i, i) != cplx(0.0)) {
      seen[i] = 1;
      queue.push_back(i);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int i = queue[head];
    for (const Matrix* m : ops)
      for (int j = 0; j < n; ++j)
        if (!seen[j] && (*m)(j, i) != cplx(0.0)) {
          seen[j] = 1;
          queue.push_back(j);
        }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

struct ReducedModel {
  int n = 0;
  std::vector<int> index;
  Matrix h_eff_static;  // H0 - i/2 sum rate L^dag L
  std::vector<std::pair<Matrix, const std::function<double(double)>*>> terms;
  std::vector<std::pair<SparseMatrix, double>> jumps;
};

SparseMatrix to_sparse(const Matrix& m) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != cplx(0.0)) triplets.emplace_back(i, j, m(i, j));
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

class Rhs {
 public:
  Rhs(const ReducedModel& model, double lo, double hi) : model_(model), lo_(lo), hi_(hi) {
    heff_.resize(model.n, model.n);
    b_.resize(model.n, model.n);
    tmp_.resize(model.n, model.n);
  }

  void operator()(const State& x, State& dxdt, double t) {
    const int n = model_.n;
    // Coefficients are sampled strictly inside the current segment so that the
    // error estimate never sees the discontinuity at a breakpoint.
    const double tc = std::clamp(t, lo_, hi_);
    heff_ = model_.h_eff_static;
    for (const auto& [op, coeff] : model_.terms) {
      const double c = (*coeff)(tc);
      if (c != 0.0) heff_.noalias() += c * op;
    }
    Eigen::Map<const Matrix> rho(reinterpret_cast<const cplx*>(x.data()), n, n);
    Eigen::Map<Matrix> drho(reinterpret_cast<cplx*>(dxdt.data()), n, n);
    b_.noalias() = heff_ * rho;
    b_ *= cplx(0.0, -1.0);
    drho = b_ + b_.adjoint();
    for (const auto& [l, rate] : model_.jumps) {
      tmp_.noalias() = l * rho;
      drho.noalias() += rate * (tmp_ * l.adjoint());
    }
  }

 private:
  const ReducedModel& model_;
  double lo_, hi_;
  Matrix heff_, b_, tmp_;
};

Matrix restrict(const Matrix& m, const std::vector<int>& idx) { return m(idx, idx); }

Matrix expand(const Matrix& reduced, const std::vector<int>& idx, int dim) {
  Matrix full = Matrix::Zero(dim, dim);
  full(idx, idx) = reduced;
  return full;
}

}  // namespace

const std::vector<double>& Trajectory::series(const std::string& name) const {
  auto it = observables.find(name);
  if (it == observables.end()) throw InvalidArgument("Trajectory: no observable named '" + name + "'");
  return it->second;
}

std::vector<double> linspace(double t0, double t1, int n) {
  if (n < 2) throw InvalidArgument("linspace: need at least two points");
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = t0 + (t1 - t0) * k / (n - 1);
  out.back() = t1;
  return out;
}

double dephasing_rate(double T1, double T2) {
  if (!(T1 > 0) || !(T2 > 0)) throw InvalidArgument("coherence times must be positive");
  if (T2 > 2.0 * T1 * (1.0 + 1e-12)) throw InvalidArgument("T2 must not exceed 2*T1");
  const double g = 0.5 * (1.0 / T2 - 1.0 / (2.0 * T1));
  return std::max(g, 0.0);
}

std::vector<CollapseChannel> channels_from_coherence(double T1, double T2, const HilbertSpace& space,
                                                     std::size_t target) {
  const int d = space.dim(target);
  const double gamma_phi = dephasing_rate(T1, T2);
  std::vector<CollapseChannel> out;
  const std::string& label = space.labels()[target];
  if (!std::isinf(T1))
    out.push_back({embed(annihilation(d), space, target), 1.0 / T1, label + ".relax"});
  if (gamma_phi > 0) {
    const Operator n = number(d);
    Matrix z = Matrix::Identity(d, d) - 2.0 * n.matrix();
    out.push_back({embed(Operator(HilbertSpace::single(d), z), space, target), gamma_phi, label + ".dephase"});
  }
  return out;
}

Trajectory evolve(const TimeDependentHamiltonian& h, const std::vector<CollapseChannel>& channels,
                  const DensityMatrix& rho0, const std::vector<double>& times, const SolverOptions& options,
                  const std::vector<Observable>& observables) {
  const HilbertSpace& space = h.space();
  if (!(rho0.space() == space)) throw DimensionError("evolve: initial state lives on a different space");
  for (const auto& c : channels) {
    if (!(c.op.space() == space)) throw DimensionError("evolve: channel '" + c.label + "' on a different space");
    if (!(c.rate >= 0) || !std::isfinite(c.rate))
      throw InvalidArgument("evolve: channel '" + c.label + "' needs a finite rate >= 0");
  }
  for (const auto& o : observables)
    if (!(o.op.space() == space)) throw DimensionError("evolve: observable '" + o.name + "' on a different space");
  if (times.empty()) throw InvalidArgument("evolve: empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InvalidArgument("evolve: times must be strictly increasing");

  const int dim = space.total_dim();
  ReducedModel model;
  if (options.reduce_to_reachable) {
    model.index = reachable_states(h, channels, rho0.matrix());
  } else {
    model.index.resize(dim);
    for (int i = 0; i < dim; ++i) model.index[i] = i;
  }
  const auto& idx = model.index;
  model.n = static_cast<int>(idx.size());
  model.h_eff_static = restrict(h.static_part(), idx);
  for (const auto& term : h.terms()) model.terms.emplace_back(restrict(term.op, idx), &term.coeff);
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    const Matrix l = restrict(c.op.matrix(), idx);
    model.h_eff_static -= cplx(0.0, 0.5 * c.rate) * (l.adjoint() * l);
    model.jumps.emplace_back(to_sparse(l), c.rate);
  }
  std::vector<Matrix> obs_reduced;
  for (const auto& o : observables) obs_reduced.push_back(restrict(o.op.matrix(), idx));

  Trajectory traj;
  traj.times = times;
  traj.reduced_dim = model.n;
  for (const auto& o : observables) traj.observables[o.name].reserve(times.size());

  const int n = model.n;
  State x(2 * static_cast<std::size_t>(n) * n);
  {
    Eigen::Map<Matrix> m(reinterpret_cast<cplx*>(x.data()), n, n);
    m = restrict(rho0.matrix(), idx);
  }

  auto record = [&](const State& state) {
    Eigen::Map<const Matrix> m(reinterpret_cast<const cplx*>(state.data()), n, n);
    for (std::size_t k = 0; k < observables.size(); ++k)
      traj.observables[observables[k].name].push_back((obs_reduced[k].transpose().cwiseProduct(m)).sum().real());
    if (options.store_states) traj.states.push_back(DensityMatrix::trusted(space, expand(m, idx, dim)));
  };
  record(x);

  // Segment boundaries: breakpoints strictly inside the requested interval.
  std::vector<double> cuts;
  for (double b : h.breakpoints())
    if (b > times.front() && b < times.back()) cuts.push_back(b);
  cuts.push_back(std::numeric_limits<double>::infinity());

  auto stepper = odeint::make_controlled(options.atol, options.rtol, options.max_step,
                                         odeint::runge_kutta_dopri5<State>());
  double t = times.front();
  double dt = 1e-10;
  if (options.max_step > 0) dt = std::min(dt, options.max_step);
  std::size_t next_out = 1;
  std::size_t next_cut = 0;
  long steps = 0;

  while (next_out < times.size()) {
    const double seg_end = std::min(cuts[next_cut], times.back());
    const double seg_start = t;
    const double pad = 1e-9 * (seg_end - seg_start);
    Rhs rhs(model, seg_start + pad, seg_end - pad);
    stepper.reset();
    while (t < seg_end) {
      const double target = std::min(times[next_out], seg_end);
      while (t < target) {
        double step = std::min(dt, target - t);
        // Land exactly on the target instead of leaving a sliver.
        if (target - (t + step) < 1e-12 * std::max(std::abs(target), 1e-12)) step = target - t;
        const double t_before = t;
        const bool landing = step == target - t;
        const auto result = stepper.try_step(std::ref(rhs), x, t, step);
        if (result == odeint::success) {
          ++steps;
          if (landing) t = target;
          // Keep the controller's suggestion unless this was a short landing step.
          if (!landing || step > dt) dt = step;
        } else {
          dt = step;
          if (dt < 1e-14 * std::max(std::abs(t), 1e-9) || dt <= 0) {
            std::ostringstream msg;
            msg << "evolve: step size underflow at t = " << t_before << " s (dt = " << dt << ")";
            throw IntegrationError(msg.str());
          }
        }
        if (steps > options.max_steps) {
          std::ostringstream msg;
          msg << "evolve: exceeded " << options.max_steps << " steps at t = " << t << " s";
          throw IntegrationError(msg.str());
        }
      }
      if (!std::isfinite(x[0])) throw IntegrationError("evolve: state became non-finite");
      if (target == times[next_out]) {
        record(x);
        ++next_out;
        if (next_out >= times.size()) break;
      }
    }
    if (seg_end == cuts[next_cut]) ++next_cut;
  }

  traj.steps = steps;
  Eigen::Map<const Matrix> m(reinterpret_cast<const cplx*>(x.data()), n, n);
  traj.final_state = DensityMatrix::trusted(space, expand(m, idx, dim));
  return traj;
}

}  // namespace qlink::solver
