#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace paint {

/// One 16-bit linear-intensity value per primary. All mixing is exact integer
/// arithmetic, so color equality is bit equality and results are reproducible
/// across platforms.
struct Color {
  std::uint16_t r = 0;
  std::uint16_t g = 0;
  std::uint16_t b = 0;

  friend constexpr bool operator==(const Color&, const Color&) = default;
};

/// Brush texture vocabulary. `blank` marks unpainted ground only and is
/// rejected wherever a painted value is constructed.
enum class Texture : std::uint8_t { smooth, stippled, impasto, transparent, blank };

constexpr std::string_view texture_name(Texture t) {
  switch (t) {
    case Texture::smooth: return "smooth";
    case Texture::stippled: return "stippled";
    case Texture::impasto: return "impasto";
    case Texture::transparent: return "transparent";
    case Texture::blank: return "blank";
  }
  return "?";
}

inline std::optional<Texture> texture_from_name(std::string_view name) {
  for (const Texture t : {Texture::smooth, Texture::stippled, Texture::impasto,
                          Texture::transparent, Texture::blank}) {
    if (texture_name(t) == name) return t;
  }
  return std::nullopt;
}

/// Pigment load in [0, 256]: 0 leaves the layer below untouched, 256 replaces
/// it outright. Construction rejects out-of-range values.
class Load {
 public:
  static constexpr int max_value = 256;

  constexpr Load() = default;
  constexpr explicit Load(int value) : value_(checked(value)) {}

  constexpr int value() const { return value_; }

  friend constexpr bool operator==(Load, Load) = default;

 private:
  static constexpr std::uint16_t checked(int v) {
    if (v < 0 || v > max_value)
      throw std::out_of_range("load " + std::to_string(v) + " outside [0, 256]");
    return static_cast<std::uint16_t>(v);
  }

  std::uint16_t value_ = 0;
};

/// Loads at or above this threshold let the top stroke's texture take over.
inline constexpr int texture_takeover_load = 128;

/// Weighted "over" blend of one channel:
///   floor((bottom * (256 - load) + top * load + 128) / 256).
/// Load 0 returns bottom, load 256 returns top, and mixing a value with
/// itself returns it unchanged for every load.
constexpr std::uint16_t mix_channel(std::uint16_t bottom, std::uint16_t top, Load load) {
  const std::uint64_t l = static_cast<std::uint64_t>(load.value());
  const std::uint64_t n = std::uint64_t{bottom} * (256 - l) + std::uint64_t{top} * l + 128;
  return static_cast<std::uint16_t>(n / 256);
}

constexpr Color mix_color(const Color& bottom, const Color& top, Load load) {
  return Color{mix_channel(bottom.r, top.r, load), mix_channel(bottom.g, top.g, load),
               mix_channel(bottom.b, top.b, load)};
}

/// Resolved visual content of one canvas region; never blank.
struct RegionPaint {
  RegionPaint(Color c, Texture t) : color(c), texture(t) {
    if (t == Texture::blank)
      throw std::invalid_argument("painted region cannot carry the blank texture");
  }

  Color color;
  Texture texture;

  friend bool operator==(const RegionPaint&, const RegionPaint&) = default;
};

/// Layering kernel: blends the top stroke's color over the bottom paint and
/// lets the top texture win once its load reaches the takeover threshold.
inline RegionPaint layer(const RegionPaint& bottom, const RegionPaint& top, Load load) {
  return RegionPaint(mix_color(bottom.color, top.color, load),
                     load.value() >= texture_takeover_load ? top.texture : bottom.texture);
}

/// Chebyshev distance between colors; 0 iff equal.
constexpr int color_distance(const Color& a, const Color& b) {
  const auto d = [](std::uint16_t x, std::uint16_t y) {
    return x > y ? int{x} - int{y} : int{y} - int{x};
  };
  return std::max({d(a.r, b.r), d(a.g, b.g), d(a.b, b.b)});
}

/// `#RRGGBB` when every channel is an exact 8-bit multiple (ch16 = ch8 * 257),
/// otherwise the full `#RRRRGGGGBBBB`.
inline std::string hex_color(const Color& c) {
  char buf[14];
  if (c.r % 257 == 0 && c.g % 257 == 0 && c.b % 257 == 0)
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r / 257, c.g / 257, c.b / 257);
  else
    std::snprintf(buf, sizeof buf, "#%04X%04X%04X", c.r, c.g, c.b);
  return buf;
}

/// Accepts `#RRGGBB` and `#RRRRGGGGBBBB`, digits in either case.
inline std::optional<Color> parse_hex_color(std::string_view s) {
  if (s.empty() || s.front() != '#') return std::nullopt;
  s.remove_prefix(1);
  if (s.size() != 6 && s.size() != 12) return std::nullopt;
  const auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  const std::size_t width = s.size() / 3;
  std::array<std::uint32_t, 3> ch{};
  for (std::size_t i = 0; i < 3; ++i) {
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < width; ++j) {
      const int n = nibble(s[i * width + j]);
      if (n < 0) return std::nullopt;
      v = v * 16 + static_cast<std::uint32_t>(n);
    }
    ch[i] = width == 2 ? v * 257 : v;
  }
  return Color{static_cast<std::uint16_t>(ch[0]), static_cast<std::uint16_t>(ch[1]),
               static_cast<std::uint16_t>(ch[2])};
}

}  // namespace paint
