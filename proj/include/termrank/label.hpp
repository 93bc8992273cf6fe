#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace termrank {

enum class Label : std::int8_t { negative = -1, positive = 1 };

constexpr bool is_positive(Label y) noexcept { return y == Label::positive; }

constexpr int to_int(Label y) noexcept { return static_cast<int>(y); }

// Accepts "1", "+1" and "-1".
inline std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "1" || s == "+1") return Label::positive;
  if (s == "-1") return Label::negative;
  return std::nullopt;
}

}  // namespace termrank
