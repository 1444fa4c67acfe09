#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "relexp/common/image.hpp"

namespace relexp::explain {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

// Column bytes of a printable ASCII glyph, bit 0 at the top. Characters
// outside 32..126 map to '?'.
const std::array<std::uint8_t, kGlyphWidth>& glyph(char c);

// Advance per character including one column of spacing.
inline int text_width(std::string_view text, int scale) {
  return static_cast<int>(text.size()) * (kGlyphWidth + 1) * scale;
}

void draw_text(Raster& raster, int x, int y, std::string_view text, int scale,
               std::array<std::uint8_t, 3> color);

}  // namespace relexp::explain
