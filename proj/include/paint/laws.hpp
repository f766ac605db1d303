#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "paint/category.hpp"

namespace paint::laws {

using json = nlohmann::ordered_json;

struct LawCheckConfig {
  std::uint64_t seed = 42;
  std::size_t samples = 64;
  std::size_t max_word_len = 4;  // Yang-Baxter needs at least 3 factors
  std::vector<Region> region_pool;
  LayerKernel layer_kernel;  // empty -> the real layering kernel
};

inline void validate(const LawCheckConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("law check needs samples >= 1");
  if (cfg.max_word_len < 3) throw std::invalid_argument("law check needs max_word_len >= 3");
  if (cfg.region_pool.empty())
    throw std::invalid_argument("law check needs a non-empty region pool");
}

/// Result of one law: `instances` counts the seeded sample iterations that
/// ran; `counterexample` is null unless the law failed, in which case it holds
/// a replayable serialization of the offending words/morphisms plus both
/// evaluations. Elapsed time is kept out of the JSON so reports stay
/// byte-identical for a given (config, seed).
struct LawEntry {
  std::string name;
  std::size_t instances = 0;
  bool passed = true;
  json counterexample;  // null when passed
  std::chrono::microseconds elapsed{0};
};

struct LawReport {
  std::uint64_t seed = 0;
  std::vector<LawEntry> laws;
  bool passed = true;
};

inline json report_json(const LawReport& report) {
  json j;
  j["seed"] = report.seed;
  json arr = json::array();
  for (const LawEntry& e : report.laws) {
    json entry;
    entry["name"] = e.name;
    entry["instances"] = e.instances;
    entry["passed"] = e.passed;
    entry["counterexample"] = e.counterexample;
    arr.push_back(std::move(entry));
  }
  j["laws"] = std::move(arr);
  j["passed"] = report.passed;
  return j;
}

inline std::string report_json_text(const LawReport& report) {
  return report_json(report).dump();
}

// --- seeded sampling --------------------------------------------------------
//
// Colors are drawn on the 8-bit subgrid scaled to 16 bits, loads half from the
// grid {0, 64, 128, 192, 256} and half uniform over [0, 256], and regions from
// the pool with a 50% chance of reusing one already present in the word —
// collisions are what exercise the same-region tensor cases.

class StateSampler {
 public:
  StateSampler(SplitMix64 rng, std::span<const Region> pool) : rng_(rng), pool_(pool) {}

  Color color() {
    const auto ch = [this] { return static_cast<std::uint16_t>(rng_.below(256) * 257); };
    return Color{ch(), ch(), ch()};
  }

  Load load() {
    static constexpr int grid[] = {0, 64, 128, 192, 256};
    if (rng_.coin()) return Load(grid[rng_.below(5)]);
    return Load(static_cast<int>(rng_.below(257)));
  }

  Texture texture() {
    static constexpr Texture paintable[] = {Texture::smooth, Texture::stippled,
                                            Texture::impasto, Texture::transparent};
    return paintable[rng_.below(4)];
  }

  const std::string& region_any() { return pool_[rng_.below(pool_.size())].name; }

  PaintState state(std::string region) {
    return PaintState(std::move(region), color(), texture(), load());
  }

  PaintState state_any() { return state(region_any()); }

  TensorWord word(std::size_t min_len, std::size_t max_len) {
    const std::size_t len = min_len + rng_.below(max_len - min_len + 1);
    TensorWord w;
    std::vector<std::string> used;
    for (std::size_t i = 0; i < len; ++i) {
      std::string region;
      if (!used.empty() && rng_.coin())
        region = used[rng_.below(used.size())];
      else
        region = region_any();
      used.push_back(region);
      w.factors.push_back(state(std::move(region)));
    }
    return w;
  }

  StrokeGen gen() {
    switch (rng_.below(5)) {
      case 0: return SetColor{color()};
      case 1: return AddColor{color(), load()};
      case 2: return SetTexture(texture());
      case 3:
        return ScaleLoad(static_cast<long long>(rng_.below(5)),
                         static_cast<long long>(1 + rng_.below(4)));
      default: return DoNothing{};
    }
  }

  /// Random generator morphism on w (|w| >= 1): mostly strokes, braids when
  /// the word is long enough.
  Morphism endo(const TensorWord& w) {
    if (w.size() >= 2 && rng_.below(10) < 3) return braid(w, rng_.below(w.size() - 1));
    return stroke_morphism(w, rng_.below(w.size()), gen());
  }

  SplitMix64& rng() { return rng_; }

 private:
  SplitMix64 rng_;
  std::span<const Region> pool_;
};

namespace detail {

inline StateSampler sampler_for(const LawCheckConfig& cfg, std::string_view law) {
  return StateSampler(stream_for(cfg.seed, law), cfg.region_pool);
}

inline LayerKernel kernel_of(const LawCheckConfig& cfg) {
  return cfg.layer_kernel ? cfg.layer_kernel : LayerKernel(default_layer_kernel);
}

inline RegionRegistry registry_of(const LawCheckConfig& cfg) {
  RegionRegistry regs;
  for (const Region& r : cfg.region_pool) regs.add(r);
  return regs;
}

inline TestEnsemble ensemble_for(StateSampler& sampler) {
  return TestEnsemble{sampler.rng().next(), 64};
}

template <typename Body>
LawEntry run_law(std::string name, Body&& body) {
  LawEntry entry;
  entry.name = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  body(entry);
  entry.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return entry;
}

inline void fail(LawEntry& entry, json counterexample) {
  entry.passed = false;
  entry.counterexample = std::move(counterexample);
}

}  // namespace detail

// --- individual laws ----------------------------------------------------------

/// All five parenthesizations of a four-fold tensor give the same word.
/// Strictness makes this true by construction; it is asserted anyway so a
/// representation change cannot silently break it.
inline LawEntry check_strict_associativity(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("strict_associativity", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "strict_associativity");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const TensorWord w1 = sampler.word(0, cfg.max_word_len);
      const TensorWord w2 = sampler.word(0, cfg.max_word_len);
      const TensorWord w3 = sampler.word(0, cfg.max_word_len);
      const TensorWord w4 = sampler.word(0, cfg.max_word_len);
      const auto& t = [](const TensorWord& a, const TensorWord& b) {
        return tensor_words(a, b);
      };
      const TensorWord groupings[] = {
          t(t(t(w1, w2), w3), w4), t(t(w1, t(w2, w3)), w4), t(t(w1, w2), t(w3, w4)),
          t(w1, t(t(w2, w3), w4)), t(w1, t(w2, t(w3, w4)))};
      ++entry.instances;
      for (const TensorWord& g : groupings) {
        if (!(g == groupings[0])) {
          detail::fail(entry, json{{"w1", word_json(w1)},
                                   {"w2", word_json(w2)},
                                   {"w3", word_json(w3)},
                                   {"w4", word_json(w4)}});
          return;
        }
      }
    }
  });
}

/// I ⊗ w = w = w ⊗ I as words and as evaluations, plus the triangle
/// (w ⊗ I) ⊗ v = w ⊗ (I ⊗ v) as word equality.
inline LawEntry check_unit_laws(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("unit_laws", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "unit_laws");
    const RegionRegistry regs = detail::registry_of(cfg);
    const LayerKernel kernel = detail::kernel_of(cfg);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const TensorWord w = sampler.word(0, cfg.max_word_len);
      const TensorWord v = sampler.word(0, cfg.max_word_len);
      const TensorWord left = tensor_words(unit_word(), w);
      const TensorWord right = tensor_words(w, unit_word());
      ++entry.instances;
      const bool words_ok = left == w && right == w;
      const bool evals_ok = canvas_equal(eval_word(left, regs, kernel),
                                         eval_word(w, regs, kernel)) &&
                            canvas_equal(eval_word(right, regs, kernel),
                                         eval_word(w, regs, kernel));
      const bool triangle_ok = tensor_words(tensor_words(w, unit_word()), v) ==
                               tensor_words(w, tensor_words(unit_word(), v));
      if (!words_ok || !evals_ok || !triangle_ok) {
        detail::fail(entry, json{{"w", word_json(w)}, {"v", word_json(v)}});
        return;
      }
    }
  });
}

/// Tensoring a state with itself in the same region changes nothing:
/// eval([s, s]) = eval([s]).
inline LawEntry check_idempotence(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("idempotence", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "idempotence");
    const RegionRegistry regs = detail::registry_of(cfg);
    const LayerKernel kernel = detail::kernel_of(cfg);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const PaintState s = sampler.state_any();
      const TensorWord once = singleton_word(s);
      const TensorWord twice = tensor_words(once, once);
      ++entry.instances;
      const CanvasState a = eval_word(twice, regs, kernel);
      const CanvasState b = eval_word(once, regs, kernel);
      if (!canvas_equal(a, b)) {
        detail::fail(entry, json{{"state", state_json(s)},
                                 {"eval_twice", canvas_json(a)},
                                 {"eval_once", canvas_json(b)}});
        return;
      }
    }
  });
}

/// Interchange: (g ∘ f) ⊗ (k ∘ h) = (g ⊗ k) ∘ (f ⊗ h).
inline LawEntry check_interchange(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("interchange", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "interchange");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const TensorWord w1 = sampler.word(1, cfg.max_word_len);
      const TensorWord w2 = sampler.word(1, cfg.max_word_len);
      const Morphism f = sampler.endo(w1);
      const Morphism g = sampler.endo(f.target());
      const Morphism h = sampler.endo(w2);
      const Morphism k = sampler.endo(h.target());
      const Morphism lhs = tensor_morphisms(compose(g, f), compose(k, h));
      const Morphism rhs = compose(tensor_morphisms(g, k), tensor_morphisms(f, h));
      ++entry.instances;
      if (!morphism_equal(lhs, rhs, detail::ensemble_for(sampler))) {
        detail::fail(entry, json{{"lhs", lhs.tree_sexpr()},
                                 {"rhs", rhs.tree_sexpr()},
                                 {"w1", word_json(w1)},
                                 {"w2", word_json(w2)}});
        return;
      }
    }
  });
}

/// Naturality of β on single factors: (g ⊗ f) ∘ β_{A,B} = β_{A',B'} ∘ (f ⊗ g).
inline LawEntry check_braid_naturality(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("braid_naturality", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "braid_naturality");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const PaintState a = sampler.state_any();
      const PaintState b =
          sampler.rng().coin() ? sampler.state(a.region) : sampler.state_any();
      const TensorWord wa = singleton_word(a);
      const TensorWord wb = singleton_word(b);
      const Morphism f = stroke_morphism(wa, 0, sampler.gen());
      const Morphism g = stroke_morphism(wb, 0, sampler.gen());
      const Morphism lhs =
          compose(tensor_morphisms(g, f), braid(tensor_words(wa, wb), 0));
      const Morphism rhs =
          compose(braid(tensor_words(f.target(), g.target()), 0), tensor_morphisms(f, g));
      ++entry.instances;
      if (!morphism_equal(lhs, rhs, detail::ensemble_for(sampler))) {
        detail::fail(entry, json{{"a", state_json(a)},
                                 {"b", state_json(b)},
                                 {"lhs", lhs.tree_sexpr()},
                                 {"rhs", rhs.tree_sexpr()}});
        return;
      }
    }
  });
}

namespace detail {

/// The two Yang-Baxter composites on [x, y, z], each built exactly as the
/// displayed equation reads: (β⊗id)∘(id⊗β)∘(β⊗id) versus (id⊗β)∘(β⊗id)∘(id⊗β).
inline std::pair<Morphism, Morphism> yang_baxter_sides(const PaintState& x,
                                                       const PaintState& y,
                                                       const PaintState& z) {
  const TensorWord wx = singleton_word(x);
  const TensorWord wy = singleton_word(y);
  const TensorWord wz = singleton_word(z);

  const Morphism l1 = tensor_morphisms(braid(tensor_words(wx, wy), 0), id_morphism(wz));
  const Morphism l2 = tensor_morphisms(id_morphism(wy), braid(tensor_words(wx, wz), 0));
  const Morphism l3 = tensor_morphisms(braid(tensor_words(wy, wz), 0), id_morphism(wx));
  const Morphism lhs = compose(l3, compose(l2, l1));

  const Morphism r1 = tensor_morphisms(id_morphism(wx), braid(tensor_words(wy, wz), 0));
  const Morphism r2 = tensor_morphisms(braid(tensor_words(wx, wz), 0), id_morphism(wy));
  const Morphism r3 = tensor_morphisms(id_morphism(wz), braid(tensor_words(wx, wy), 0));
  const Morphism rhs = compose(r3, compose(r2, r1));

  return {lhs, rhs};
}

}  // namespace detail

/// Yang-Baxter: both ways of braiding three factors are the same morphism
/// [X,Y,Z] -> [Z,Y,X].
inline LawEntry check_yang_baxter(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("yang_baxter", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "yang_baxter");
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const TensorWord triple = sampler.word(3, 3);
      const PaintState& x = triple.factors[0];
      const PaintState& y = triple.factors[1];
      const PaintState& z = triple.factors[2];
      const auto [lhs, rhs] = detail::yang_baxter_sides(x, y, z);
      TensorWord reversed;
      reversed.factors = {z, y, x};
      ++entry.instances;
      const bool endpoints_ok = lhs.source() == triple && rhs.source() == triple &&
                                lhs.target() == reversed && rhs.target() == reversed;
      if (!endpoints_ok || !morphism_equal(lhs, rhs, detail::ensemble_for(sampler))) {
        detail::fail(entry, json{{"triple", word_json(triple)},
                                 {"lhs", lhs.tree_sexpr()},
                                 {"rhs", rhs.tree_sexpr()}});
        return;
      }
    }
  });
}

/// Trivial braiding: disjoint-region pairs evaluate the same in either order,
/// and braiding against the unit object is the identity morphism. The fixed
/// negative control confirms that a same-region pair at load 200 is *not*
/// order-invisible, so the check cannot pass vacuously.
inline LawEntry check_trivial_braiding(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("trivial_braiding", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "trivial_braiding");
    const RegionRegistry regs = detail::registry_of(cfg);
    const LayerKernel kernel = detail::kernel_of(cfg);
    const auto& pool = cfg.region_pool;

    if (pool.size() >= 2) {
      for (std::size_t i = 0; i < cfg.samples; ++i) {
        const std::size_t ri = sampler.rng().below(pool.size());
        std::size_t rj = sampler.rng().below(pool.size() - 1);
        if (rj >= ri) ++rj;
        const PaintState a = sampler.state(pool[ri].name);
        const PaintState b = sampler.state(pool[rj].name);
        TensorWord ab;
        ab.factors = {a, b};
        TensorWord ba;
        ba.factors = {b, a};
        ++entry.instances;
        if (!canvas_equal(eval_word(ab, regs, kernel), eval_word(ba, regs, kernel))) {
          detail::fail(entry, json{{"a", state_json(a)},
                                   {"b", state_json(b)},
                                   {"eval_ab", canvas_json(eval_word(ab, regs, kernel))},
                                   {"eval_ba", canvas_json(eval_word(ba, regs, kernel))}});
          return;
        }
      }
    }

    // Braiding with the unit object in either slot is the identity.
    const TensorWord wa = singleton_word(sampler.state_any());
    if (!morphism_equal(braid_blocks(wa, unit_word()), id_morphism(wa)) ||
        !morphism_equal(braid_blocks(unit_word(), wa), id_morphism(wa))) {
      detail::fail(entry, json{{"unit_braiding_on", word_json(wa)}});
      return;
    }

    // Negative control: red over blue at load 200 in one region differs from
    // blue over red, so same-region pairs are rightly excluded from triviality.
    const std::string& region = pool.front().name;
    const PaintState red(region, Color{65535, 0, 0}, Texture::smooth, Load(200));
    const PaintState blue(region, Color{0, 0, 65535}, Texture::smooth, Load(200));
    TensorWord rb;
    rb.factors = {red, blue};
    TensorWord br;
    br.factors = {blue, red};
    if (canvas_equal(eval_word(rb, regs, kernel), eval_word(br, regs, kernel))) {
      detail::fail(entry, json{{"negative_control", "same-region pair at load 200 "
                                                    "evaluated as order-invisible"}});
      return;
    }
  });
}

// --- pigment dominance ----------------------------------------------------------

/// How far apart the two layering orders of a same-region pair land:
/// 0 means the order is invisible on canvas.
struct DominanceReport {
  int distance = 0;
  CanvasState first_then_second;
  CanvasState second_then_first;
};

inline DominanceReport check_dominance(const PaintState& a, const PaintState& b,
                                       const RegionRegistry& regions,
                                       const LayerKernel& kernel = default_layer_kernel) {
  if (a.region != b.region)
    throw std::invalid_argument("dominance compares two states in the same region");
  TensorWord ab;
  ab.factors = {a, b};
  TensorWord ba;
  ba.factors = {b, a};
  DominanceReport report;
  report.first_then_second = eval_word(ab, regions, kernel);
  report.second_then_first = eval_word(ba, regions, kernel);
  report.distance = color_distance(report.first_then_second.regions.at(a.region).color,
                                   report.second_then_first.regions.at(a.region).color);
  return report;
}

/// Sampled dominance sanity (distance is symmetric in the pair; identical
/// states are order-invisible) plus the two fixed witnesses: an asymmetric
/// pair at load 200 and a symmetric pair at load 128.
inline LawEntry check_dominance_law(const LawCheckConfig& cfg) {
  validate(cfg);
  return detail::run_law("dominance", [&cfg](LawEntry& entry) {
    StateSampler sampler = detail::sampler_for(cfg, "dominance");
    const RegionRegistry regs = detail::registry_of(cfg);
    const LayerKernel kernel = detail::kernel_of(cfg);
    const std::string& region = cfg.region_pool.front().name;

    for (std::size_t i = 0; i < cfg.samples; ++i) {
      const PaintState a = sampler.state(region);
      const PaintState b = sampler.rng().coin() ? a : sampler.state(region);
      const DominanceReport fwd = check_dominance(a, b, regs, kernel);
      const DominanceReport rev = check_dominance(b, a, regs, kernel);
      ++entry.instances;
      const bool symmetric_measure = fwd.distance == rev.distance;
      const bool identical_invisible = !(a == b) || fwd.distance == 0;
      if (!symmetric_measure || !identical_invisible) {
        detail::fail(entry, json{{"a", state_json(a)},
                                 {"b", state_json(b)},
                                 {"distance_ab", fwd.distance},
                                 {"distance_ba", rev.distance}});
        return;
      }
    }

    const PaintState red_hi(region, Color{65535, 0, 0}, Texture::smooth, Load(200));
    const PaintState blue_hi(region, Color{0, 0, 65535}, Texture::smooth, Load(200));
    if (check_dominance(red_hi, blue_hi, regs, kernel).distance <= 0) {
      detail::fail(entry, json{{"witness", "load-200 pair was order-invisible"}});
      return;
    }
    const PaintState red_mid(region, Color{65535, 0, 0}, Texture::smooth, Load(128));
    const PaintState blue_mid(region, Color{0, 0, 65535}, Texture::smooth, Load(128));
    if (check_dominance(red_mid, blue_mid, regs, kernel).distance != 0) {
      detail::fail(entry, json{{"witness", "load-128 pair was order-sensitive"}});
      return;
    }
  });
}

// --- whole suite -----------------------------------------------------------------

inline LawReport run_all(const LawCheckConfig& cfg) {
  validate(cfg);
  LawReport report;
  report.seed = cfg.seed;
  report.laws.push_back(check_strict_associativity(cfg));
  report.laws.push_back(check_unit_laws(cfg));
  report.laws.push_back(check_idempotence(cfg));
  report.laws.push_back(check_interchange(cfg));
  report.laws.push_back(check_braid_naturality(cfg));
  report.laws.push_back(check_yang_baxter(cfg));
  report.laws.push_back(check_trivial_braiding(cfg));
  report.laws.push_back(check_dominance_law(cfg));
  for (const LawEntry& e : report.laws) report.passed = report.passed && e.passed;
  return report;
}

}  // namespace paint::laws
