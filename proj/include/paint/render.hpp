#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paint/canvas.hpp"

namespace paint::render {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Rgb8&, const Rgb8&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB, 3 bytes per pixel

  void set(int x, int y, Rgb8 c) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }

  Rgb8 get(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return Rgb8{pixels[i], pixels[i + 1], pixels[i + 2]};
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Monotone 16->8 bit: floor((ch + 128) / 257); maps 0 -> 0 and 65535 -> 255.
constexpr std::uint8_t channel_to_8bit(std::uint16_t ch) {
  return static_cast<std::uint8_t>((static_cast<std::uint32_t>(ch) + 128) / 257);
}

constexpr Rgb8 color_to_rgb8(const Color& c) {
  return Rgb8{channel_to_8bit(c.r), channel_to_8bit(c.g), channel_to_8bit(c.b)};
}

/// Fixed per-pixel texture modulation; pure arithmetic on coordinates so
/// golden images never move.
constexpr Rgb8 texture_pattern(Texture t, int x, int y, Rgb8 base) {
  const auto darken = [](Rgb8 c, int amount) {
    const auto d = [amount](std::uint8_t v) {
      return static_cast<std::uint8_t>(v < amount ? 0 : v - amount);
    };
    return Rgb8{d(c.r), d(c.g), d(c.b)};
  };
  switch (t) {
    case Texture::smooth: return base;
    case Texture::stippled: return (x + 2 * y) % 4 == 0 ? darken(base, 48) : base;
    case Texture::impasto: return (x + y) % 6 < 2 ? darken(base, 32) : base;
    case Texture::transparent: {
      const auto lift = [](std::uint8_t v) {
        return static_cast<std::uint8_t>(v + (255 - v) / 2);
      };
      return Rgb8{lift(base.r), lift(base.g), lift(base.b)};
    }
    case Texture::blank: return base;
  }
  return base;
}

/// White ground, painted regions filled from their resolved color through the
/// texture pattern. Every registered region must fit inside the image.
inline Image rasterize(const CanvasState& canvas, const RegionRegistry& regions, int width,
                       int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image size must be at least 1x1");
  for (const Region& r : regions.regions()) {
    if (r.bounds.x + r.bounds.width > width || r.bounds.y + r.bounds.height > height)
      throw std::out_of_range("region '" + r.name + "' does not fit in a " +
                              std::to_string(width) + "x" + std::to_string(height) +
                              " image");
  }
  Image img{width, height, std::vector<std::uint8_t>(3u * width * height, 255)};
  for (const auto& [name, rp] : canvas.regions) {
    const Rect rect = regions.at(name).bounds;
    const Rgb8 base = color_to_rgb8(rp.color);
    for (int y = rect.y; y < rect.y + rect.height; ++y) {
      for (int x = rect.x; x < rect.x + rect.width; ++x) {
        img.set(x, y, texture_pattern(rp.texture, x, y, base));
      }
    }
  }
  return img;
}

/// Binary PPM (P6): `P6\n<w> <h>\n255\n` followed by raw RGB bytes.
inline std::string write_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

inline void write_ppm_file(const Image& img, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::string bytes = write_ppm(img);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace paint::render
