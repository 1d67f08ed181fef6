#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qbmm {

// Invalid argument ranges (negative variance, nonpositive density, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A moment sequence whose Hankel forms are not strictly positive definite.
// `minor_order` is the order k of the first leading principal minor that
// failed and `pivot` the Cholesky pivot found there (<= 0 or non-finite).
class RealizabilityError : public std::runtime_error {
 public:
  RealizabilityError(const std::string& what, int minor_order, double pivot)
      : std::runtime_error(what), minor_order_(minor_order), pivot_(pivot) {}

  int minor_order() const { return minor_order_; }
  double pivot() const { return pivot_; }

 private:
  int minor_order_;
  double pivot_;
};

// EQMOM inversion could not reproduce the input moments.
class InversionError : public std::runtime_error {
 public:
  InversionError(const std::string& what, double residual, double bracket_lo,
                 double bracket_hi)
      : std::runtime_error(what),
        residual_(residual),
        bracket_lo_(bracket_lo),
        bracket_hi_(bracket_hi) {}

  double residual() const { return residual_; }
  double bracket_lo() const { return bracket_lo_; }
  double bracket_hi() const { return bracket_hi_; }

 private:
  double residual_;
  double bracket_lo_;
  double bracket_hi_;
};

class RootFindingError : public std::runtime_error {
 public:
  RootFindingError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// Input outside the set on which an operation is defined (e.g. the Shakhov
// source Jacobian away from equilibrium).
class UnsupportedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration: unknown key, unparsable value, violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cell lost realizability during a run.
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(const std::string& what, int cell, double time, std::vector<double> moments)
      : std::runtime_error(what), cell_(cell), time_(time), moments_(std::move(moments)) {}

  int cell() const { return cell_; }
  double time() const { return time_; }
  const std::vector<double>& moments() const { return moments_; }

 private:
  int cell_;
  double time_;
  std::vector<double> moments_;
};

}  // namespace qbmm
