#pragma once

#include <stdexcept>
#include <string>

namespace crossflow {

/// Base class for every error raised by the library. `code()` is a stable
/// machine-readable identifier that the CLI forwards into its error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

/// An iterative method stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double final_residual)
      : Error("convergence_error", what), final_residual_(final_residual) {}

  double final_residual() const noexcept { return final_residual_; }

 private:
  double final_residual_;
};

/// Two densities that must share a grid do not.
class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error("grid_mismatch", what) {}
};

/// Invalid density data (negative values, zero mass, wrong size).
class InvalidDensity : public Error {
 public:
  explicit InvalidDensity(const std::string& what) : Error("invalid_density", what) {}
};

/// The per-cell proximal Newton solve failed.
class ProxFailure : public Error {
 public:
  ProxFailure(const std::string& what, int cell, double log_rho, double log_mu)
      : Error("prox_failure", what), cell_(cell), log_rho_(log_rho), log_mu_(log_mu) {}

  int cell() const noexcept { return cell_; }
  double log_rho() const noexcept { return log_rho_; }
  double log_mu() const noexcept { return log_mu_; }

 private:
  int cell_;
  double log_rho_;
  double log_mu_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

}  // namespace crossflow
