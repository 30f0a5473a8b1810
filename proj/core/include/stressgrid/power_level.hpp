#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace stressgrid {

// Five home power states. L1 is full disconnection, L5 unrestricted
// (bounded only by the meter rating).
enum class PowerLevel : std::uint8_t { L1 = 1, L2 = 2, L3 = 3, L4 = 4, L5 = 5 };

inline constexpr std::array<PowerLevel, 5> kAllLevels{
    PowerLevel::L1, PowerLevel::L2, PowerLevel::L3, PowerLevel::L4, PowerLevel::L5};

constexpr int ordinal(PowerLevel level) noexcept { return static_cast<int>(level); }

/// 0-based index usable for per-level arrays.
constexpr std::size_t level_index(PowerLevel level) noexcept {
  return static_cast<std::size_t>(ordinal(level) - 1);
}

/// Fraction of the home's rated capacity a level may draw.
constexpr double cap_fraction(PowerLevel level) noexcept {
  switch (level) {
    case PowerLevel::L1: return 0.0;
    case PowerLevel::L2: return 0.25;
    case PowerLevel::L3: return 0.5;
    case PowerLevel::L4: return 0.75;
    case PowerLevel::L5: return 1.0;
  }
  return 0.0;
}

/// One step down; L1 has no lower level.
constexpr std::optional<PowerLevel> level_below(PowerLevel level) noexcept {
  if (level == PowerLevel::L1) return std::nullopt;
  return static_cast<PowerLevel>(ordinal(level) - 1);
}

constexpr std::string_view to_string(PowerLevel level) noexcept {
  switch (level) {
    case PowerLevel::L1: return "L1";
    case PowerLevel::L2: return "L2";
    case PowerLevel::L3: return "L3";
    case PowerLevel::L4: return "L4";
    case PowerLevel::L5: return "L5";
  }
  return "?";
}

}  // namespace stressgrid
