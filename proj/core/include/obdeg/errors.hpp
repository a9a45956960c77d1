#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace obdeg {

enum class ErrorKind {
  configuration,
  range,
  solver,
  evaluation,
  degeneracy,
  not_a_zero,
  input,
  incomplete_tracking,
  left_admissible_set,
  non_convergence,
  continuation_stuck,
  degenerate_reflection,
  inadmissible_state,
  data,
  positivity,
  unsupported_regime,
  threshold_not_found,
  numerical,
  assembly,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by evaluators when an argument lies outside their domain of
// definition. residual() rethrows it as EvaluationError with node data.
class EvaluatorFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(std::size_t node, Eigen::Vector2d x, const std::string& detail);
  std::size_t node() const noexcept { return node_; }
  const Eigen::Vector2d& point() const noexcept { return x_; }

 private:
  std::size_t node_;
  Eigen::Vector2d x_;
};

class InadmissibleStateError : public Error {
 public:
  InadmissibleStateError(std::vector<std::size_t> nodes, const std::string& detail);
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<std::size_t> nodes_;
};

class LeftAdmissibleSetError : public Error {
 public:
  LeftAdmissibleSetError(int iterate, double lambda, double chi, const std::string& detail);
  int iterate() const noexcept { return iterate_; }
  double lambda() const noexcept { return lambda_; }
  double chi() const noexcept { return chi_; }

 private:
  int iterate_;
  double lambda_;
  double chi_;
};

struct SingularValueSample {
  double N;
  double sigma_min;
  double sigma_max;
};

class ThresholdNotFoundError : public Error {
 public:
  ThresholdNotFoundError(std::vector<SingularValueSample> profile, const std::string& detail);
  const std::vector<SingularValueSample>& profile() const noexcept { return profile_; }

 private:
  std::vector<SingularValueSample> profile_;
};

}  // namespace obdeg
