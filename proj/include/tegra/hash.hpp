#pragma once

#include <cstdint>
#include <string_view>
#include <type_traits>

namespace tegra {

// 64-bit FNV-1a, fed little-endian integer bytes so digests are portable.
class Fnv1a {
 public:
  template <typename T>
    requires std::is_integral_v<T>
  void add(T value) {
    auto bits = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) byte(static_cast<std::uint8_t>(bits >> (8 * i)));
  }

  void add(std::string_view s) {
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }

  std::uint64_t value() const { return state_; }

 private:
  void byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }

  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace tegra
