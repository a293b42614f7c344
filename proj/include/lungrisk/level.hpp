#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace lungrisk {

// Severity level of a patient record. The numeric value is the encoding
// used everywhere downstream (targets, confusion-matrix order, reports).
enum class Level : int { Low = 1, Medium = 2, High = 3 };

inline constexpr std::array<Level, 3> kAllLevels = {Level::Low, Level::Medium, Level::High};
inline constexpr int kNumLevels = 3;

constexpr int level_code(Level l) noexcept { return static_cast<int>(l); }

constexpr std::string_view level_name(Level l) noexcept {
  switch (l) {
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: return "High";
  }
  return "?";
}

// Case-insensitive, surrounding whitespace ignored.
std::optional<Level> level_from_name(std::string_view name);
std::optional<Level> level_from_code(int code);

}  // namespace lungrisk
