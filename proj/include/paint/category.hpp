#pragma once

#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "paint/canvas.hpp"
#include "paint/rng.hpp"

namespace paint {

/// Object of the category: an ordered word of paint states. Tensor is
/// concatenation and the empty word is the unit, so associativity and the
/// unit laws hold as literal equality of words, not up to isomorphism.
struct TensorWord {
  std::vector<PaintState> factors;

  std::size_t size() const { return factors.size(); }
  bool empty() const { return factors.empty(); }

  friend bool operator==(const TensorWord&, const TensorWord&) = default;
};

inline TensorWord unit_word() { return {}; }

inline TensorWord tensor_words(const TensorWord& lhs, const TensorWord& rhs) {
  TensorWord out;
  out.factors.reserve(lhs.size() + rhs.size());
  out.factors.insert(out.factors.end(), lhs.factors.begin(), lhs.factors.end());
  out.factors.insert(out.factors.end(), rhs.factors.begin(), rhs.factors.end());
  return out;
}

inline TensorWord singleton_word(PaintState s) {
  TensorWord w;
  w.factors.push_back(std::move(s));
  return w;
}

inline CanvasState eval_word(const TensorWord& w, const RegionRegistry& regions) {
  return eval_factors(w.factors, regions);
}

inline CanvasState eval_word(const TensorWord& w, const RegionRegistry& regions,
                             const LayerKernel& kernel) {
  return eval_factors(w.factors, regions, kernel);
}

// --- stroke generators ------------------------------------------------------
//
// Generators act on a single word position and never change the region a
// factor points at, so every morphism keeps the arity and region signature of
// its source.

struct SetColor {
  Color color;
  friend bool operator==(const SetColor&, const SetColor&) = default;
};

/// Mixes `color` into the factor's color at the generator's own load; the
/// factor's load field is untouched.
struct AddColor {
  Color color;
  Load load;
  friend bool operator==(const AddColor&, const AddColor&) = default;
};

struct SetTexture {
  explicit SetTexture(Texture t) : texture(t) {
    if (t == Texture::blank)
      throw std::invalid_argument("a stroke cannot paint the blank texture");
  }
  Texture texture;
  friend bool operator==(const SetTexture&, const SetTexture&) = default;
};

/// Multiplies the factor's load by num/den (floor division), clamped to
/// [0, 256]. Stored in lowest terms.
struct ScaleLoad {
  ScaleLoad(long long n, long long d) {
    if (d <= 0) throw std::invalid_argument("scale_load denominator must be positive");
    if (n < 0) throw std::invalid_argument("scale_load numerator must be non-negative");
    const long long g = std::gcd(n, d);
    num = g == 0 ? 0 : n / g;
    den = g == 0 ? 1 : d / g;
    if (num == 0) den = 1;
  }
  long long num = 0;
  long long den = 1;
  friend bool operator==(const ScaleLoad&, const ScaleLoad&) = default;
};

struct DoNothing {
  friend bool operator==(const DoNothing&, const DoNothing&) = default;
};

using StrokeGen = std::variant<SetColor, AddColor, SetTexture, ScaleLoad, DoNothing>;

inline PaintState apply_gen(const StrokeGen& gen, PaintState s) {
  std::visit(
      [&s](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, SetColor>) {
          s.color = g.color;
        } else if constexpr (std::is_same_v<G, AddColor>) {
          s.color = mix_color(s.color, g.color, g.load);
        } else if constexpr (std::is_same_v<G, SetTexture>) {
          s.texture = g.texture;
        } else if constexpr (std::is_same_v<G, ScaleLoad>) {
          const long long scaled = static_cast<long long>(s.load.value()) * g.num / g.den;
          s.load = Load(static_cast<int>(std::min<long long>(scaled, Load::max_value)));
        } else {
          static_assert(std::is_same_v<G, DoNothing>);
        }
      },
      gen);
  return s;
}

inline std::string gen_sexpr(const StrokeGen& gen) {
  return std::visit(
      [](const auto& g) -> std::string {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, SetColor>) {
          return "(set_color " + hex_color(g.color) + ")";
        } else if constexpr (std::is_same_v<G, AddColor>) {
          return "(add_color " + hex_color(g.color) + " " + std::to_string(g.load.value()) +
                 ")";
        } else if constexpr (std::is_same_v<G, SetTexture>) {
          return "(set_texture " + std::string(texture_name(g.texture)) + ")";
        } else if constexpr (std::is_same_v<G, ScaleLoad>) {
          return "(scale_load " + std::to_string(g.num) + "/" + std::to_string(g.den) + ")";
        } else {
          return "(do_nothing)";
        }
      },
      gen);
}

// --- morphisms ---------------------------------------------------------------

class compose_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct MorphNode;
using MorphNodePtr = std::shared_ptr<const MorphNode>;

struct MorphNode {
  struct Id {
    std::size_t arity;
  };
  struct Stroke {
    std::size_t position;
    StrokeGen gen;
  };
  struct Swap {
    std::size_t position;
  };
  struct Comp {  // after ∘ before
    MorphNodePtr after;
    MorphNodePtr before;
  };
  struct Tensor {  // left block has `split` factors
    MorphNodePtr left;
    MorphNodePtr right;
    std::size_t split;
  };

  std::variant<Id, Stroke, Swap, Comp, Tensor> node;
};

inline void run_node(const MorphNode& n, std::span<PaintState> state) {
  std::visit(
      [&state](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, MorphNode::Id>) {
          // no effect
        } else if constexpr (std::is_same_v<V, MorphNode::Stroke>) {
          state[v.position] = apply_gen(v.gen, std::move(state[v.position]));
        } else if constexpr (std::is_same_v<V, MorphNode::Swap>) {
          std::swap(state[v.position], state[v.position + 1]);
        } else if constexpr (std::is_same_v<V, MorphNode::Comp>) {
          run_node(*v.before, state);
          run_node(*v.after, state);
        } else {
          run_node(*v.left, state.first(v.split));
          run_node(*v.right, state.subspan(v.split));
        }
      },
      n.node);
}

inline std::string node_sexpr(const MorphNode& n) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, MorphNode::Id>) {
          return "(id " + std::to_string(v.arity) + ")";
        } else if constexpr (std::is_same_v<V, MorphNode::Stroke>) {
          return "(stroke " + std::to_string(v.position) + " " + gen_sexpr(v.gen) + ")";
        } else if constexpr (std::is_same_v<V, MorphNode::Swap>) {
          return "(braid " + std::to_string(v.position) + ")";
        } else if constexpr (std::is_same_v<V, MorphNode::Comp>) {
          return "(comp " + node_sexpr(*v.after) + " " + node_sexpr(*v.before) + ")";
        } else {
          return "(tensor " + node_sexpr(*v.left) + " " + node_sexpr(*v.right) + ")";
        }
      },
      n.node);
}

}  // namespace detail

/// Arrow of the category: endpoint words plus a composition/tensor tree over
/// the generators {identity, stroke-at-position, adjacent braid}. The
/// denotation — `apply` — is the induced function on word states of the
/// source's signature, and `target == apply(source)` holds by construction.
class Morphism {
 public:
  const TensorWord& source() const { return source_; }
  const TensorWord& target() const { return target_; }

  /// Denotation on a word state with the same arity and region signature as
  /// the source.
  std::vector<PaintState> apply(std::vector<PaintState> state) const {
    if (state.size() != source_.size())
      throw std::invalid_argument("word state arity does not match morphism source");
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i].region != source_.factors[i].region)
        throw std::invalid_argument("word state region signature does not match source");
    }
    detail::run_node(*tree_, std::span<PaintState>(state));
    return state;
  }

  /// Canonical S-expression of the composition tree, e.g.
  /// `(comp (braid 0) (tensor (stroke 0 (set_texture stippled)) (id 1)))`.
  std::string tree_sexpr() const { return detail::node_sexpr(*tree_); }

  friend Morphism id_morphism(TensorWord w);
  friend Morphism stroke_morphism(const TensorWord& w, std::size_t position, StrokeGen gen);
  friend Morphism braid(const TensorWord& w, std::size_t position);
  friend Morphism compose(const Morphism& g, const Morphism& f);
  friend Morphism tensor_morphisms(const Morphism& f, const Morphism& g);

 private:
  Morphism(TensorWord src, TensorWord tgt, detail::MorphNodePtr tree)
      : source_(std::move(src)), target_(std::move(tgt)), tree_(std::move(tree)) {}

  TensorWord source_;
  TensorWord target_;
  detail::MorphNodePtr tree_;
};

/// do_nothing on every factor: source = target = w.
inline Morphism id_morphism(TensorWord w) {
  auto tree = std::make_shared<const detail::MorphNode>(
      detail::MorphNode{detail::MorphNode::Id{w.size()}});
  TensorWord tgt = w;
  return Morphism(std::move(w), std::move(tgt), std::move(tree));
}

/// One brushstroke at `position`; the factor is rewritten by the generator
/// and every other factor is untouched.
inline Morphism stroke_morphism(const TensorWord& w, std::size_t position, StrokeGen gen) {
  if (position >= w.size())
    throw std::out_of_range("stroke position " + std::to_string(position) +
                            " out of range for word of length " + std::to_string(w.size()));
  TensorWord tgt = w;
  tgt.factors[position] = apply_gen(gen, tgt.factors[position]);
  auto tree = std::make_shared<const detail::MorphNode>(
      detail::MorphNode{detail::MorphNode::Stroke{position, std::move(gen)}});
  return Morphism(w, std::move(tgt), std::move(tree));
}

/// β at `position`: transposes adjacent factors, changing nothing else.
inline Morphism braid(const TensorWord& w, std::size_t position) {
  if (w.size() < 2 || position > w.size() - 2)
    throw std::out_of_range("braid position " + std::to_string(position) +
                            " out of range for word of length " + std::to_string(w.size()));
  TensorWord tgt = w;
  std::swap(tgt.factors[position], tgt.factors[position + 1]);
  auto tree = std::make_shared<const detail::MorphNode>(
      detail::MorphNode{detail::MorphNode::Swap{position}});
  return Morphism(w, std::move(tgt), std::move(tree));
}

/// g ∘ f; defined only when f.target = g.source factor-for-factor.
inline Morphism compose(const Morphism& g, const Morphism& f) {
  if (!(f.target_ == g.source_))
    throw compose_error("compose boundary mismatch: f.target differs from g.source");
  auto tree = std::make_shared<const detail::MorphNode>(
      detail::MorphNode{detail::MorphNode::Comp{g.tree_, f.tree_}});
  return Morphism(f.source_, g.target_, std::move(tree));
}

/// f ⊗ g acting blockwise: f on the first |f.source| factors, g on the rest.
inline Morphism tensor_morphisms(const Morphism& f, const Morphism& g) {
  auto tree = std::make_shared<const detail::MorphNode>(
      detail::MorphNode{detail::MorphNode::Tensor{f.tree_, g.tree_, f.source_.size()}});
  return Morphism(tensor_words(f.source_, g.source_), tensor_words(f.target_, g.target_),
                  std::move(tree));
}

/// Block braiding left ⊗ right -> right ⊗ left, built from adjacent braids.
/// With either block empty this is the identity, which is exactly the trivial
/// braiding against the unit object.
inline Morphism braid_blocks(const TensorWord& left, const TensorWord& right) {
  TensorWord cur = tensor_words(left, right);
  Morphism out = id_morphism(cur);
  const std::size_t m = left.size();
  const std::size_t n = right.size();
  if (m == 0 || n == 0) return out;
  for (std::size_t p = m; p-- > 0;) {
    // bubble the factor now at position p to position p + n
    for (std::size_t j = p; j < p + n; ++j) {
      Morphism step = braid(cur, j);
      cur = step.target();
      out = compose(step, out);
    }
  }
  return out;
}

// --- extensional equality -----------------------------------------------------

/// Deterministic word-state ensemble for morphism comparison: the source word
/// itself, boundary states (loads 0 / 256, channels 0 / 65535), and `samples`
/// seeded draws over the source's region signature.
struct TestEnsemble {
  std::uint64_t seed = 42;
  std::size_t samples = 64;
};

namespace detail {

inline std::vector<std::vector<PaintState>> ensemble_states(const TensorWord& source,
                                                            const TestEnsemble& ensemble) {
  std::vector<std::vector<PaintState>> states;
  states.push_back(source.factors);

  const auto variant_of = [&source](auto&& tweak) {
    std::vector<PaintState> s = source.factors;
    for (PaintState& f : s) tweak(f);
    return s;
  };
  states.push_back(variant_of([](PaintState& f) { f.load = Load(0); }));
  states.push_back(variant_of([](PaintState& f) { f.load = Load(Load::max_value); }));
  states.push_back(variant_of([](PaintState& f) { f.color = Color{0, 0, 0}; }));
  states.push_back(variant_of([](PaintState& f) { f.color = Color{65535, 65535, 65535}; }));

  SplitMix64 rng = stream_for(ensemble.seed, "morphism-ensemble");
  constexpr Texture textures[] = {Texture::smooth, Texture::stippled, Texture::impasto,
                                  Texture::transparent};
  for (std::size_t i = 0; i < ensemble.samples; ++i) {
    std::vector<PaintState> s;
    s.reserve(source.size());
    for (const PaintState& f : source.factors) {
      const Color c{static_cast<std::uint16_t>(rng.below(65536)),
                    static_cast<std::uint16_t>(rng.below(65536)),
                    static_cast<std::uint16_t>(rng.below(65536))};
      s.emplace_back(f.region, c, textures[rng.below(4)],
                     Load(static_cast<int>(rng.below(257))));
    }
    states.push_back(std::move(s));
  }
  return states;
}

}  // namespace detail

/// Decidable stand-in for arrow equality: endpoints must match exactly and the
/// denotations must agree on every ensemble state.
inline bool morphism_equal(const Morphism& f, const Morphism& g,
                           const TestEnsemble& ensemble = {}) {
  if (!(f.source() == g.source()) || !(f.target() == g.target())) return false;
  for (const auto& state : detail::ensemble_states(f.source(), ensemble)) {
    if (!(f.apply(state) == g.apply(state))) return false;
  }
  return true;
}

// --- word JSON -----------------------------------------------------------------

inline nlohmann::ordered_json word_json(const TensorWord& w) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const PaintState& s : w.factors) arr.push_back(state_json(s));
  return arr;
}

inline std::optional<TensorWord> word_from_json(const nlohmann::json& j) {
  if (!j.is_array()) return std::nullopt;
  TensorWord w;
  for (const auto& item : j) {
    auto s = state_from_json(item);
    if (!s) return std::nullopt;
    w.factors.push_back(std::move(*s));
  }
  return w;
}

}  // namespace paint
