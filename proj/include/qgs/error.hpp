#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgs {

enum class ErrorCode {
  // input / validation
  ParseError,
  InvalidPotential,
  DuplicateVertex,
  UnknownVertexReference,
  IsolatedVertex,
  DegreeBoundExceeded,
  OddGraphWithUnevenPotential,
  // numerical
  ScanResolutionExceeded,
  EigensolverFailure,
  // domain
  DirichletPole,
  BandIndexOutOfRange,
  NotAnEigenpair,
  MeshTooCoarse,
  WindowMismatch,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool is_numerical() const noexcept {
    return code_ == ErrorCode::ScanResolutionExceeded || code_ == ErrorCode::EigensolverFailure;
  }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidPotential: return "InvalidPotential";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::UnknownVertexReference: return "UnknownVertexReference";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::DegreeBoundExceeded: return "DegreeBoundExceeded";
    case ErrorCode::OddGraphWithUnevenPotential: return "OddGraphWithUnevenPotential";
    case ErrorCode::ScanResolutionExceeded: return "ScanResolutionExceeded";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::DirichletPole: return "DirichletPole";
    case ErrorCode::BandIndexOutOfRange: return "BandIndexOutOfRange";
    case ErrorCode::NotAnEigenpair: return "NotAnEigenpair";
    case ErrorCode::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace qgs
