#include "fusionlab/error.hpp"

#include <algorithm>
#include <sstream>

namespace fusionlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPhysicalInput: return "NonPhysicalInput";
    case ErrorCode::NotInvolutory: return "NotInvolutory";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::AlreadyInterrupted: return "AlreadyInterrupted";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::MissingRegime: return "MissingRegime";
    case ErrorCode::UnknownAxis: return "UnknownAxis";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidBundle: return "InvalidBundle";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NonPhysicalProbability: return "NonPhysicalProbability";
    case ErrorCode::UnknownProtocol: return "UnknownProtocol";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::WrongTopology: return "WrongTopology";
    case ErrorCode::DegenerateBundle: return "DegenerateBundle";
    case ErrorCode::BadCardinality: return "BadCardinality";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NonMonotoneOrBudget: return "NonMonotoneOrBudget";
    case ErrorCode::WrongCardinality: return "WrongCardinality";
    case ErrorCode::ZeroConditioningEvent: return "ZeroConditioningEvent";
    case ErrorCode::UnsupportedStructure: return "UnsupportedStructure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void ValidationReport::fail(std::string property, std::string subject, std::string message) {
  failures.push_back({std::move(property), std::move(subject), std::move(message)});
}

bool ValidationReport::has_failure(std::string_view property) const {
  return std::any_of(failures.begin(), failures.end(),
                     [&](const Diagnostic& d) { return d.property == property; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    const auto& d = failures[i];
    if (i) os << "; ";
    os << d.property << "(" << d.subject << "): " << d.message;
  }
  return os.str();
}

}  // namespace fusionlab
