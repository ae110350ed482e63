#include "infoforge/color.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "infoforge/error.hpp"

namespace infoforge {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return 10 + c - 'a';
  return -1;
}

double linearize(std::uint8_t channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

}  // namespace

Color Color::from_hex(std::string_view hex) {
  if (!hex.empty() && hex.front() == '#') hex.remove_prefix(1);
  if (hex.size() != 3 && hex.size() != 6) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid color '#{}'", hex));
  }
  int v[6];
  for (std::size_t i = 0; i < hex.size(); ++i) {
    v[i] = hex_digit(hex[i]);
    if (v[i] < 0) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("invalid color '#{}'", hex));
    }
  }
  if (hex.size() == 3) {
    return {static_cast<std::uint8_t>(v[0] * 17), static_cast<std::uint8_t>(v[1] * 17),
            static_cast<std::uint8_t>(v[2] * 17)};
  }
  return {static_cast<std::uint8_t>(v[0] * 16 + v[1]),
          static_cast<std::uint8_t>(v[2] * 16 + v[3]),
          static_cast<std::uint8_t>(v[4] * 16 + v[5])};
}

std::string Color::hex() const { return fmt::format("#{:02x}{:02x}{:02x}", r, g, b); }

double relative_luminance(const Color& c) {
  return 0.2126 * linearize(c.r) + 0.7152 * linearize(c.g) + 0.0722 * linearize(c.b);
}

double contrast_ratio(const Color& a, const Color& b) {
  const double la = relative_luminance(a);
  const double lb = relative_luminance(b);
  return (std::max(la, lb) + 0.05) / (std::min(la, lb) + 0.05);
}

}  // namespace infoforge
