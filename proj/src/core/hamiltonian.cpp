#include "qlink/core/hamiltonian.hpp"

#include <algorithm>

#include "qlink/core/error.hpp"

namespace qlink {

TimeDependentHamiltonian::TimeDependentHamiltonian(HilbertSpace space)
    : space_(std::move(space)),
      static_(Matrix::Zero(space_.total_dim(), space_.total_dim())) {}

TimeDependentHamiltonian::TimeDependentHamiltonian(HilbertSpace space, Matrix static_part)
    : space_(std::move(space)), static_(std::move(static_part)) {
  if (static_.rows() != space_.total_dim() || static_.cols() != space_.total_dim())
    throw DimensionError("TimeDependentHamiltonian: static part has wrong shape");
}

void TimeDependentHamiltonian::add_static(const Matrix& m) {
  if (m.rows() != static_.rows() || m.cols() != static_.cols())
    throw DimensionError("TimeDependentHamiltonian::add_static: wrong shape");
  static_ += m;
}

void TimeDependentHamiltonian::add_term(Matrix op, std::function<double(double)> coeff,
                                        std::string label) {
  if (op.rows() != static_.rows() || op.cols() != static_.cols())
    throw DimensionError("TimeDependentHamiltonian::add_term: wrong shape");
  terms_.push_back({std::move(op), std::move(coeff), std::move(label)});
}

void TimeDependentHamiltonian::add_breakpoint(double t) {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.end() || *it != t) breakpoints_.insert(it, t);
}

Matrix TimeDependentHamiltonian::at(double t) const {
  Matrix h = static_;
  for (const auto& term : terms_) {
    const double c = term.coeff(t);
    if (c != 0.0) h.noalias() += c * term.op;
  }
  return h;
}

}  // namespace qlink
