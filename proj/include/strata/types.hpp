#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace strata {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A state or input failed the finiteness / dimension contract.
class InvalidStateError : public std::runtime_error {
 public:
  explicit InvalidStateError(const std::string& what) : std::runtime_error(what) {}
};

/// Constraint gradients were linearly dependent at the evaluation point.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(int row, const std::string& what)
      : std::runtime_error(what), row_(row) {}
  int row() const noexcept { return row_; }

 private:
  int row_;
};

/// The normal-projection fixed point moved away from the manifold.
/// Usually a sign that the step-size is too large for the local curvature.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, double residual, const std::string& what)
      : std::runtime_error(what), iteration_(iteration), residual_(residual) {}
  int iteration() const noexcept { return iteration_; }
  double residual() const noexcept { return residual_; }

 private:
  int iteration_;
  double residual_;
};

/// Requested a catalog facility (e.g. an intrinsic model) that the entry lacks.
class NotAvailableError : public std::runtime_error {
 public:
  explicit NotAvailableError(const std::string& what) : std::runtime_error(what) {}
};

/// A run-configuration field failed validation. `field` names the offender.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace strata
