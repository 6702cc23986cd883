#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fusionlab {

enum class ErrorCode {
  DimensionMismatch,
  NonPhysicalInput,
  NotInvolutory,
  NotHermitian,
  UnknownNode,
  AlreadyInterrupted,
  InvalidScenario,
  MissingRegime,
  UnknownAxis,
  NotNormalized,
  InvalidBundle,
  InvalidModel,
  NonPhysicalProbability,
  UnknownProtocol,
  OutOfRange,
  WrongTopology,
  DegenerateBundle,
  BadCardinality,
  SizeLimit,
  NonMonotoneOrBudget,
  WrongCardinality,
  ZeroConditioningEvent,
  UnsupportedStructure,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One violated property, e.g. {"PSD", "state", "minimum eigenvalue -1e-4"}.
struct Diagnostic {
  std::string property;
  std::string subject;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> failures;

  bool ok() const noexcept { return failures.empty(); }
  explicit operator bool() const noexcept { return ok(); }

  void fail(std::string property, std::string subject, std::string message);
  bool has_failure(std::string_view property) const;
  std::string summary() const;
};

}  // namespace fusionlab
