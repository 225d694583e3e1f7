#pragma once

#include <stdexcept>
#include <string>

namespace rtm {

enum class ErrorKind {
  InvalidArgument,
  NoReturn,
  NonFinite,
  Overflow,
  TruncationUnsound,
  InsufficientWordLength,
  EmptyFiber,
  DepthUnderflow,
  AnchorMissing,
  DivergentDiagnostics,
  HypothesisFail,
  NotMixedWithinHorizon,
  SandwichViolation,
  NoConvergence,
  ZeroRow,
  NotStochastic,
  ConfigError,
  UnknownFixture,
};

const char* kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command line tool.
namespace exit_code {
constexpr int ok = 0;
constexpr int internal = 1;
constexpr int config = 2;
constexpr int bip = 3;
constexpr int convergence = 4;
constexpr int assertion = 5;
}  // namespace exit_code

int exit_code_for(ErrorKind kind);

}  // namespace rtm
