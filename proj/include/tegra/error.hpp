#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tegra {

enum class ErrorCode {
  OutOfRangeVertex,
  ZeroWeight,
  ParseError,
  IoError,
  BadProbabilities,
  CapacityExceeded,
  UnknownChannel,
  AddressOutOfRange,
  EmptyWindow,
  OverflowRegionFull,
  BadSource,
  ArithmeticOverflow,
  ConfigError,
  NoProgress,
  MismatchedWorkload,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the simulator; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tegra
