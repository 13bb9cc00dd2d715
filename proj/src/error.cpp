#include "nnjump/error.hpp"

namespace nnjump {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::EmptyTail: return "EmptyTail";
    case ErrorKind::RateExceedsDominator: return "RateExceedsDominator";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MonotonicityUnverified: return "MonotonicityUnverified";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NonOsgood: return "NonOsgood";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace nnjump
