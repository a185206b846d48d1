#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tiltflow {

enum class ErrorKind {
  InvalidSpec,
  DegenerateCylinder,
  NotAdmissible,
  ChordOutside,
  UnsupportedMode,
  InvalidDistribution,
  OverlappingTerminals,
  CapacityLengthMismatch,
  NoDualTerminals,
  InterleavedTerminals,
  InfiniteMean,
  BadSchedule,
  ScheduleViolation,
  EmptyGrid,
  PreconditionViolated,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DegenerateCylinder: return "DegenerateCylinder";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::ChordOutside: return "ChordOutside";
    case ErrorKind::UnsupportedMode: return "UnsupportedMode";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::OverlappingTerminals: return "OverlappingTerminals";
    case ErrorKind::CapacityLengthMismatch: return "CapacityLengthMismatch";
    case ErrorKind::NoDualTerminals: return "NoDualTerminals";
    case ErrorKind::InterleavedTerminals: return "InterleavedTerminals";
    case ErrorKind::InfiniteMean: return "InfiniteMean";
    case ErrorKind::BadSchedule: return "BadSchedule";
    case ErrorKind::ScheduleViolation: return "ScheduleViolation";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code and a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // the message without the kind prefix
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace tiltflow
