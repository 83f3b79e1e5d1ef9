#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ricciot {

enum class ErrorKind {
  BaseMismatch,
  OutOfRange,
  DegeneratePlane,
  NotUnit,
  NotTangent,
  RejectionStall,
  OutsideBall,
  DimensionMismatch,
  TooLarge,
  NotInBall,
  UnknownVertex,
  EmptyBall,
  Disconnected,
  InvalidExponents,
  InvalidArgument,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure is reported as an Error carrying the kind named in
/// the operation contracts, so callers (and tests) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegeneratePlane: return "DegeneratePlane";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::NotTangent: return "NotTangent";
    case ErrorKind::RejectionStall: return "RejectionStall";
    case ErrorKind::OutsideBall: return "OutsideBall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotInBall: return "NotInBall";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::EmptyBall: return "EmptyBall";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::InvalidExponents: return "InvalidExponents";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace ricciot
