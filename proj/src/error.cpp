#include "tegra/error.hpp"

namespace tegra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfRangeVertex: return "OutOfRangeVertex";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadProbabilities: return "BadProbabilities";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::AddressOutOfRange: return "AddressOutOfRange";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::OverflowRegionFull: return "OverflowRegionFull";
    case ErrorCode::BadSource: return "BadSource";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoProgress: return "NoProgress";
    case ErrorCode::MismatchedWorkload: return "MismatchedWorkload";
  }
  return "Unknown";
}

}  // namespace tegra
