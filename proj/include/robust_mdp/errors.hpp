#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robust_mdp {

enum class ErrorCode {
  RowNotStochastic,
  RewardOutOfRange,
  BadDiscount,
  DimensionMismatch,
  NotConverged,
  NegativeValueEntry,
  InvalidParams,
  DomainError,
  ZeroVisit,
  InsufficientData,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Base class of every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Iterative solver stopped at the iteration cap with the residual still above tol.
class NotConverged : public Error {
 public:
  NotConverged(std::size_t iterations, double residual);

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

}  // namespace robust_mdp
