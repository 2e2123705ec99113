#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlink/core/operators.hpp"

namespace qlink {

/// One time-dependent contribution coeff(t) * op.
struct HamiltonianTerm {
  Matrix op;
  std::function<double(double)> coeff;
  std::string label;
};

/// H(t) = static_part + sum_k coeff_k(t) * op_k, in angular units (rad/s, hbar = 1).
///
/// Breakpoints mark times where some coefficient may be discontinuous; the
/// integrator never steps across them.
class TimeDependentHamiltonian {
 public:
  explicit TimeDependentHamiltonian(HilbertSpace space);
  TimeDependentHamiltonian(HilbertSpace space, Matrix static_part);

  const HilbertSpace& space() const { return space_; }
  const Matrix& static_part() const { return static_; }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  void add_static(const Matrix& m);
  void add_term(Matrix op, std::function<double(double)> coeff, std::string label = {});
  void add_breakpoint(double t);

  Matrix at(double t) const;
  Matrix operator()(double t) const { return at(t); }

 private:
  HilbertSpace space_;
  Matrix static_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<double> breakpoints_;
};

}  // namespace qlink
