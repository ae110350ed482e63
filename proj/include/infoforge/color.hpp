#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace infoforge {

/// 8-bit sRGB color.
struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  /// Accepts "#rrggbb" or "#rgb"; throws Error(kInvalidArgument) otherwise.
  static Color from_hex(std::string_view hex);
  std::string hex() const;

  friend bool operator==(const Color&, const Color&) = default;
};

/// WCAG 2.x relative luminance in [0,1].
double relative_luminance(const Color& c);

/// WCAG contrast ratio in [1,21]; symmetric in its arguments.
double contrast_ratio(const Color& a, const Color& b);

}  // namespace infoforge
