#include "cifuse/error.hpp"

#include <sstream>

namespace cifuse {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotPd: return "NotPd";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::SingularJoint: return "SingularJoint";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidFamilyParameter: return "InvalidFamilyParameter";
    case ErrorCode::SingularSigma: return "SingularSigma";
    case ErrorCode::DegenerateQ: return "DegenerateQ";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::ScheduleError: return "ScheduleError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string not_psd_message(double min_eig) {
  std::ostringstream os;
  os.precision(17);
  os << "matrix is not positive semidefinite (min eigenvalue " << min_eig << ")";
  return os.str();
}

std::string family_message(double alpha, const std::string& reason) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha = " << alpha << " is not a valid family parameter: " << reason;
  return os.str();
}

}  // namespace

NotPsdError::NotPsdError(double min_eig)
    : Error(ErrorCode::NotPsd, not_psd_message(min_eig)), min_eig_(min_eig) {}

InvalidFamilyParameterError::InvalidFamilyParameterError(double alpha,
                                                         const std::string& reason)
    : Error(ErrorCode::InvalidFamilyParameter, family_message(alpha, reason)),
      alpha_(alpha) {}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InternalInconsistency:
      return false;
    default:
      return true;
  }
}

}  // namespace cifuse
