#pragma once

#include <stdexcept>
#include <string>

namespace cifuse {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NotPsd,
  NotPd,
  InternalInconsistency,
  RankDeficient,
  AssumptionViolated,  // rank conditions on H1, H2, [H1; H2]
  SingularJoint,
  NotInterior,
  OutOfRange,
  InvalidFamilyParameter,
  SingularSigma,
  DegenerateQ,
  Unreachable,
  ScheduleError,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by psd_certify; carries the offending eigenvalue.
class NotPsdError : public Error {
 public:
  explicit NotPsdError(double min_eig);

  double min_eig() const noexcept { return min_eig_; }

 private:
  double min_eig_;
};

class InvalidFamilyParameterError : public Error {
 public:
  InvalidFamilyParameterError(double alpha, const std::string& reason);

  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// True for failures caused by bad user input rather than by the library.
bool is_input_error(ErrorCode code);

}  // namespace cifuse
