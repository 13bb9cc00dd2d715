#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnjump {

enum class ErrorKind {
  Divergent,
  InvalidAlpha,
  EmptyTail,
  RateExceedsDominator,
  InvalidModel,
  InvalidArgument,
  MonotonicityUnverified,
  QuadratureFailure,
  NonOsgood,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Numerical errors (exit 3) as opposed to configuration errors (exit 2).
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::Divergent || kind_ == ErrorKind::QuadratureFailure ||
           kind_ == ErrorKind::NonOsgood || kind_ == ErrorKind::RateExceedsDominator ||
           kind_ == ErrorKind::EmptyTail;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace nnjump
