#pragma once
#include <stdexcept>
#include <string>

namespace qds {

enum class ErrorCode {
  AmbientMismatch,
  NotASubspace,
  LayerMismatch,
  WindowOverflow,
  CutoffTooSmall,
  BudgetTooSmall,
  BudgetExceeded,
  NotWellDefined,
  NotStabilized,
  NotAProjection,
  ModuleMismatch,
  ConfigInvalid,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode c, const std::string& msg)
      : std::runtime_error(std::string(error_name(c)) + ": " + msg), code_(c) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qds
