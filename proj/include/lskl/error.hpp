#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lskl {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kNoClosedForm,
  kIntegrationFailure,
  kOptimizationFailure,
  kMleFailure,
  kDataModelMismatch,
  kNoModelExplainsData,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Adaptive refinement ran out of subdivisions; the partial estimate is kept.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double partial, double error)
      : Error(ErrorCode::kIntegrationFailure, what), partial_(partial), error_(error) {}
  double partial_estimate() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

class OptimizationFailure : public Error {
 public:
  OptimizationFailure(const std::string& what, std::vector<double> best, double best_value)
      : Error(ErrorCode::kOptimizationFailure, what), best_(std::move(best)), best_value_(best_value) {}
  const std::vector<double>& best_so_far() const noexcept { return best_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_;
  double best_value_;
};

}  // namespace lskl
