#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hsparse {

enum class ErrorCode {
  SingletonEdge,
  NonpositiveWeight,
  VertexOutOfRange,
  DuplicateVertexInEdge,
  DimensionMismatch,
  InfeasibleParameters,
  InvalidArgument,
  DisconnectedPair,
  Disconnected,
  SingularMatrix,
  ZeroEnergyDirection,
  TooLarge,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Numeric failures map to a distinct CLI exit code.
  bool is_numeric() const noexcept {
    return code_ == ErrorCode::Disconnected || code_ == ErrorCode::DisconnectedPair ||
           code_ == ErrorCode::SingularMatrix || code_ == ErrorCode::ZeroEnergyDirection;
  }

 private:
  ErrorCode code_;
};

}  // namespace hsparse
