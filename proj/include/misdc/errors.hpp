#pragma once

#include <stdexcept>
#include <string>

namespace misdc {

/// Base class for all toolkit failures that are not precondition violations.
/// Precondition violations (bad sizes, bad arguments, kind mismatches) throw
/// std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Banded LU hit a zero or below-threshold pivot after partial pivoting.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, int pivot_index)
      : Error(what), pivot_index_(pivot_index) {}
  int pivot_index() const noexcept { return pivot_index_; }

 private:
  int pivot_index_;
};

/// A denominator (cell average, analytic pole) is too close to zero.
class SingularInputError : public Error {
 public:
  SingularInputError(const std::string& what, int index)
      : Error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// Evaluation requested at (or within the guard radius of) an analytic pole
/// of the iteration-map expressions.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed to reach its residual tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double worst_residual,
                      int cell_index, int iterations)
      : Error(what),
        worst_residual_(worst_residual),
        cell_index_(cell_index),
        iterations_(iterations) {}
  double worst_residual() const noexcept { return worst_residual_; }
  int cell_index() const noexcept { return cell_index_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double worst_residual_;
  int cell_index_;
  int iterations_;
};

/// An implicit solve failed inside an SDC sweep; carries which temporal node
/// and which correction iteration were being processed. The root cause is
/// attached as a nested exception.
class SweepSolveError : public Error {
 public:
  SweepSolveError(const std::string& what, int node, int iteration)
      : Error(what), node_(node), iteration_(iteration) {}
  int node() const noexcept { return node_; }
  int iteration() const noexcept { return iteration_; }

 private:
  int node_;
  int iteration_;
};

/// A failure while advancing the benchmark PDE; carries the step index.
/// The root cause is attached as a nested exception.
class TimeStepError : public Error {
 public:
  TimeStepError(const std::string& what, int step)
      : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Malformed study configuration (file or values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace misdc
