#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "paint/color.hpp"

namespace paint {

/// Axis-aligned pixel rectangle; width and height are at least 1 once the
/// region is registered.
struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

constexpr bool rects_overlap(const Rect& a, const Rect& b) {
  return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height &&
         b.y < a.y + a.height;
}

struct Region {
  std::string name;
  Rect bounds;

  friend bool operator==(const Region&, const Region&) = default;
};

class region_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class unknown_region_error : public std::out_of_range {
 public:
  explicit unknown_region_error(std::string region)
      : std::out_of_range("unknown region '" + region + "'"), region_(std::move(region)) {}

  const std::string& region() const { return region_; }

 private:
  std::string region_;
};

/// Registered canvas geometry. Names are unique and rectangles are pairwise
/// disjoint; both are checked at registration.
class RegionRegistry {
 public:
  void add(Region region) {
    if (region.name.empty()) throw region_error("region name must be non-empty");
    if (region.bounds.x < 0 || region.bounds.y < 0)
      throw region_error("region '" + region.name + "' has a negative origin");
    if (region.bounds.width < 1 || region.bounds.height < 1)
      throw region_error("region '" + region.name + "' must be at least 1x1");
    if (index_.contains(region.name))
      throw region_error("region '" + region.name + "' is already declared");
    for (const Region& other : regions_) {
      if (rects_overlap(other.bounds, region.bounds))
        throw region_error("region '" + region.name + "' overlaps region '" + other.name +
                           "'");
    }
    index_.emplace(region.name, regions_.size());
    regions_.push_back(std::move(region));
  }

  bool contains(std::string_view name) const { return index_.contains(std::string(name)); }

  const Region* find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &regions_[it->second];
  }

  const Region& at(std::string_view name) const {
    if (const Region* r = find(name)) return *r;
    throw unknown_region_error(std::string(name));
  }

  const std::vector<Region>& regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }

 private:
  std::vector<Region> regions_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// One atomic painting fact: (color, texture, load) aimed at a named region.
struct PaintState {
  PaintState(std::string region_name, Color c, Texture t, Load l)
      : region(std::move(region_name)), color(c), texture(t), load(l) {
    if (region.empty()) throw std::invalid_argument("paint state needs a region name");
    if (t == Texture::blank)
      throw std::invalid_argument("paint state cannot carry the blank texture");
  }

  std::string region;
  Color color;
  Texture texture;
  Load load;

  friend bool operator==(const PaintState&, const PaintState&) = default;
};

/// Evaluated canvas: region name -> resolved paint. Regions absent from the
/// map are bare ground, so the empty map is the blank canvas.
struct CanvasState {
  std::map<std::string, RegionPaint> regions;

  friend bool operator==(const CanvasState&, const CanvasState&) = default;
};

inline CanvasState blank() { return {}; }

inline bool canvas_equal(const CanvasState& a, const CanvasState& b) { return a == b; }

/// Folding rule for one same-region step; swappable so the law suite can be
/// run against a deliberately broken kernel.
using LayerKernel = std::function<RegionPaint(const RegionPaint&, const PaintState&)>;

inline RegionPaint layer(const RegionPaint& bottom, const PaintState& top) {
  return layer(bottom, RegionPaint(top.color, top.texture), top.load);
}

inline RegionPaint default_layer_kernel(const RegionPaint& bottom, const PaintState& top) {
  return layer(bottom, top);
}

/// Left-to-right fold of paint states onto the canvas. The first coat in a
/// region covers the ground directly; later coats in the same region are
/// layered over what is already there.
inline CanvasState eval_factors(std::span<const PaintState> factors,
                                const RegionRegistry& regions, const LayerKernel& kernel) {
  CanvasState canvas;
  for (const PaintState& s : factors) {
    if (!regions.contains(s.region)) throw unknown_region_error(s.region);
    const auto it = canvas.regions.find(s.region);
    if (it == canvas.regions.end())
      canvas.regions.emplace(s.region, RegionPaint(s.color, s.texture));
    else
      it->second = kernel(it->second, s);
  }
  return canvas;
}

inline CanvasState eval_factors(std::span<const PaintState> factors,
                                const RegionRegistry& regions) {
  return eval_factors(factors, regions, default_layer_kernel);
}

// --- canonical JSON -------------------------------------------------------

inline nlohmann::ordered_json state_json(const PaintState& s) {
  nlohmann::ordered_json j;
  j["region"] = s.region;
  j["color"] = hex_color(s.color);
  j["texture"] = std::string(texture_name(s.texture));
  j["load"] = s.load.value();
  return j;
}

inline std::optional<PaintState> state_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("region") || !j.contains("color") ||
      !j.contains("texture") || !j.contains("load"))
    return std::nullopt;
  const auto color = parse_hex_color(j.at("color").get<std::string>());
  const auto texture = texture_from_name(j.at("texture").get<std::string>());
  const int load = j.at("load").get<int>();
  if (!color || !texture || *texture == Texture::blank || load < 0 || load > Load::max_value)
    return std::nullopt;
  return PaintState(j.at("region").get<std::string>(), *color, *texture, Load(load));
}

/// `{"R1":{"color":"#...","texture":"..."}}` with region keys in lexicographic
/// order; this is the byte-stable form used by reports and golden tests.
inline nlohmann::ordered_json canvas_json(const CanvasState& canvas) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, rp] : canvas.regions) {
    nlohmann::ordered_json entry;
    entry["color"] = hex_color(rp.color);
    entry["texture"] = std::string(texture_name(rp.texture));
    j[name] = std::move(entry);
  }
  return j;
}

inline std::string canvas_json_text(const CanvasState& canvas) {
  return canvas_json(canvas).dump();
}

}  // namespace paint
