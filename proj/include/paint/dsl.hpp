#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "paint/category.hpp"
#include "paint/laws.hpp"
#include "paint/render.hpp"

// Stroke-program language. Grammar (one statement per line, `#` comments):
//
//   stmt      := region | statebind | wordbind | strokebind
//              | apply | braidstmt | check | render | print
//   region    := "region" IDENT "rect" INT INT INT INT
//   statebind := "state" IDENT "=" "paint" IDENT
//                "color" HEXCOLOR "texture" TEXNAME "load" INT
//   wordbind  := "word" IDENT "=" wexpr
//   wexpr     := wterm { ("(x)" | "⊗") wterm }
//   wterm     := IDENT | "I" | "(" wexpr ")"
//   strokebind:= "stroke" IDENT "=" gen
//   gen       := "set_color" HEXCOLOR | "add_color" HEXCOLOR INT
//              | "set_texture" TEXNAME | "scale_load" INT "/" INT
//              | "do_nothing"
//   apply     := "apply" IDENT "to" IDENT "at" INT
//   braidstmt := "braid" IDENT "at" INT
//   check     := "check" "laws" [ "seed" INT ] [ "samples" INT ]
//   render    := "render" IDENT STRING [ "size" INT INT ]
//   print     := "print" IDENT
//   TEXNAME   := "smooth" | "stippled" | "impasto" | "transparent"
//
// Parsing and binding are separate phases: the parser only checks shape, and
// unbound names, range violations and region clashes surface at evaluation
// with the statement's source position.

namespace paint::dsl {

struct SourcePos {
  int line = 1;
  int column = 1;
};

// --- tokens ---------------------------------------------------------------

struct Token {
  enum class Kind {
    ident,
    keyword,
    integer,
    hexcolor,  // lexeme holds the digits, 6 or 12 of them
    string,    // lexeme holds the unquoted contents
    tensor,    // "(x)" or the ⊗ alias
    lparen,
    rparen,
    slash,
    equals,
    newline,
    eof,
  };

  Kind kind = Kind::eof;
  std::string lexeme;
  int line = 1;
  int column = 1;
};

struct LexError {
  std::string message;
  int line = 1;
  int column = 1;
};

struct TokenizeResult {
  std::vector<Token> tokens;
  std::optional<LexError> error;

  bool ok() const { return !error.has_value(); }
};

namespace detail {

inline constexpr std::array<std::string_view, 30> keywords = {
    "region",    "rect",      "state",       "paint",      "color",
    "texture",   "load",      "word",        "stroke",     "apply",
    "to",        "at",        "braid",       "check",      "laws",
    "seed",      "samples",   "render",      "size",       "print",
    "I",         "set_color", "add_color",   "set_texture", "scale_load",
    "do_nothing", "smooth",   "stippled",    "impasto",    "transparent"};

inline bool is_keyword(std::string_view s) {
  for (const std::string_view k : keywords)
    if (k == s) return true;
  return false;
}

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace detail

inline TokenizeResult tokenize(std::string_view src) {
  TokenizeResult out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  const auto push = [&](Token::Kind kind, std::string lexeme, int at_line, int at_col) {
    out.tokens.push_back(Token{kind, std::move(lexeme), at_line, at_col});
  };
  const auto fail = [&](std::string message, int at_line, int at_col) {
    out.error = LexError{std::move(message), at_line, at_col};
  };

  while (i < src.size()) {
    const char c = src[i];
    const int at_line = line;
    const int at_col = col;

    if (c == '\n') {
      push(Token::Kind::newline, "\n", at_line, at_col);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      // `#` directly followed by a hex digit starts a color literal; anything
      // else starts a comment running to end of line.
      if (i + 1 < src.size() && detail::is_hex_digit(src[i + 1])) {
        std::size_t j = i + 1;
        while (j < src.size() && detail::is_hex_digit(src[j])) ++j;
        const std::size_t len = j - (i + 1);
        const bool terminated =
            (len == 6 || len == 12) && (j >= src.size() || !detail::is_ident_char(src[j]));
        if (!terminated) {
          fail("unterminated hex color: expected exactly 6 or 12 hex digits after '#'",
               at_line, at_col);
          return out;
        }
        push(Token::Kind::hexcolor, std::string(src.substr(i + 1, len)), at_line, at_col);
        col += static_cast<int>(len) + 1;
        i = j;
        continue;
      }
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') {
        fail("unterminated string literal", at_line, at_col);
        return out;
      }
      push(Token::Kind::string, std::string(src.substr(i + 1, j - i - 1)), at_line, at_col);
      col += static_cast<int>(j - i) + 1;
      i = j + 1;
      continue;
    }
    if (c == '(') {
      if (i + 2 < src.size() && src[i + 1] == 'x' && src[i + 2] == ')') {
        push(Token::Kind::tensor, "(x)", at_line, at_col);
        i += 3;
        col += 3;
        continue;
      }
      push(Token::Kind::lparen, "(", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == ')') {
      push(Token::Kind::rparen, ")", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '=') {
      push(Token::Kind::equals, "=", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    if (c == '/') {
      push(Token::Kind::slash, "/", at_line, at_col);
      ++i;
      ++col;
      continue;
    }
    // ⊗ (UTF-8 e2 8a 97) is an alias for "(x)".
    if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < src.size() &&
        static_cast<unsigned char>(src[i + 1]) == 0x8A &&
        static_cast<unsigned char>(src[i + 2]) == 0x97) {
      push(Token::Kind::tensor, "(x)", at_line, at_col);
      i += 3;
      ++col;
      continue;
    }
    if (detail::is_digit(c)) {
      std::size_t j = i;
      while (j < src.size() && detail::is_digit(src[j])) ++j;
      push(Token::Kind::integer, std::string(src.substr(i, j - i)), at_line, at_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (detail::is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && detail::is_ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      const Token::Kind kind =
          detail::is_keyword(word) ? Token::Kind::keyword : Token::Kind::ident;
      push(kind, std::move(word), at_line, at_col);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    fail(std::string("unknown character '") + c + "'", at_line, at_col);
    return out;
  }
  push(Token::Kind::eof, "", line, col);
  return out;
}

// --- AST --------------------------------------------------------------------

struct WordExpr;
bool operator==(const WordExpr& a, const WordExpr& b);

struct WordExpr {
  struct Name {
    std::string id;
    friend bool operator==(const Name&, const Name&) = default;
  };
  struct Unit {
    friend bool operator==(const Unit&, const Unit&) = default;
  };
  struct Tensor {
    std::shared_ptr<WordExpr> lhs;
    std::shared_ptr<WordExpr> rhs;
  };

  std::variant<Name, Unit, Tensor> node;
};

inline bool operator==(const WordExpr::Tensor& a, const WordExpr::Tensor& b) {
  return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}
inline bool operator==(const WordExpr& a, const WordExpr& b) { return a.node == b.node; }

struct GenSetColor {
  Color color;
  friend bool operator==(const GenSetColor&, const GenSetColor&) = default;
};
struct GenAddColor {
  Color color;
  std::uint64_t load = 0;
  friend bool operator==(const GenAddColor&, const GenAddColor&) = default;
};
struct GenSetTexture {
  Texture texture = Texture::smooth;
  friend bool operator==(const GenSetTexture&, const GenSetTexture&) = default;
};
struct GenScaleLoad {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const GenScaleLoad&, const GenScaleLoad&) = default;
};
struct GenDoNothing {
  friend bool operator==(const GenDoNothing&, const GenDoNothing&) = default;
};
using GenExpr =
    std::variant<GenSetColor, GenAddColor, GenSetTexture, GenScaleLoad, GenDoNothing>;

struct RegionStmt {
  std::string name;
  std::uint64_t x = 0, y = 0, width = 0, height = 0;
  friend bool operator==(const RegionStmt&, const RegionStmt&) = default;
};
struct StateStmt {
  std::string name;
  std::string region;
  Color color;
  Texture texture = Texture::smooth;
  std::uint64_t load = 0;
  friend bool operator==(const StateStmt&, const StateStmt&) = default;
};
struct WordStmt {
  std::string name;
  WordExpr expr;
  friend bool operator==(const WordStmt&, const WordStmt&) = default;
};
struct StrokeStmt {
  std::string name;
  GenExpr gen;
  friend bool operator==(const StrokeStmt&, const StrokeStmt&) = default;
};
struct ApplyStmt {
  std::string stroke;
  std::string word;
  std::uint64_t position = 0;
  friend bool operator==(const ApplyStmt&, const ApplyStmt&) = default;
};
struct BraidStmt {
  std::string word;
  std::uint64_t position = 0;
  friend bool operator==(const BraidStmt&, const BraidStmt&) = default;
};
struct CheckStmt {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  friend bool operator==(const CheckStmt&, const CheckStmt&) = default;
};
struct RenderStmt {
  std::string word;
  std::string path;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> size;
  friend bool operator==(const RenderStmt&, const RenderStmt&) = default;
};
struct PrintStmt {
  std::string word;
  friend bool operator==(const PrintStmt&, const PrintStmt&) = default;
};

using StmtNode = std::variant<RegionStmt, StateStmt, WordStmt, StrokeStmt, ApplyStmt,
                              BraidStmt, CheckStmt, RenderStmt, PrintStmt>;

struct Stmt {
  StmtNode node;
  SourcePos pos;
};

struct Script {
  std::vector<Stmt> stmts;
};

/// AST equality modulo source positions; this is the round-trip fixpoint
/// relation used by the formatter tests.
inline bool ast_equal(const Script& a, const Script& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i) {
    if (!(a.stmts[i].node == b.stmts[i].node)) return false;
  }
  return true;
}

// --- parser --------------------------------------------------------------------

struct ParseError {
  std::string message;
  int line = 1;
  int column = 1;
  std::vector<std::string> expected;
};

struct ParseResult {
  Script script;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

namespace detail {

inline constexpr std::size_t max_parse_errors = 10;

struct Bail {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult result;
    while (!at(Token::Kind::eof)) {
      if (at(Token::Kind::newline)) {
        advance();
        continue;
      }
      try {
        Stmt stmt = parse_stmt();
        end_of_statement();
        result.script.stmts.push_back(std::move(stmt));
      } catch (const Bail& bail) {
        result.errors.push_back(bail.error);
        if (result.errors.size() >= max_parse_errors) break;
        recover();
      }
    }
    return result;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }
  bool at(Token::Kind k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw) const {
    return peek().kind == Token::Kind::keyword && peek().lexeme == kw;
  }

  [[noreturn]] void error(std::string message, std::vector<std::string> expected) const {
    throw Bail{ParseError{std::move(message), peek().line, peek().column,
                          std::move(expected)}};
  }

  void recover() {
    while (!at(Token::Kind::eof)) {
      if (at(Token::Kind::newline)) {
        advance();
        return;
      }
      advance();
    }
  }

  void end_of_statement() {
    if (at(Token::Kind::eof)) return;
    if (!at(Token::Kind::newline))
      error("expected end of statement before '" + peek().lexeme + "'", {"newline"});
    advance();
  }

  std::string expect_ident() {
    if (!at(Token::Kind::ident))
      error("expected identifier, found '" + peek().lexeme + "'", {"IDENT"});
    return advance().lexeme;
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) error("expected '" + std::string(kw) + "'", {std::string(kw)});
    advance();
  }

  void expect(Token::Kind kind, const std::string& what) {
    if (!at(kind)) error("expected " + what + ", found '" + peek().lexeme + "'", {what});
    advance();
  }

  std::uint64_t expect_int() {
    if (!at(Token::Kind::integer))
      error("expected integer, found '" + peek().lexeme + "'", {"INT"});
    const Token& tok = advance();
    std::uint64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(tok.lexeme.data(), tok.lexeme.data() + tok.lexeme.size(), value);
    if (ec != std::errc{} || ptr != tok.lexeme.data() + tok.lexeme.size())
      throw Bail{ParseError{"integer literal out of range", tok.line, tok.column, {"INT"}}};
    return value;
  }

  Color expect_hexcolor() {
    if (!at(Token::Kind::hexcolor))
      error("expected hex color, found '" + peek().lexeme + "'", {"HEXCOLOR"});
    const Token& tok = advance();
    const auto c = parse_hex_color("#" + tok.lexeme);
    if (!c)
      throw Bail{ParseError{"malformed hex color", tok.line, tok.column, {"HEXCOLOR"}}};
    return *c;
  }

  Texture expect_texname() {
    for (const std::string_view name : {"smooth", "stippled", "impasto", "transparent"}) {
      if (at_kw(name)) {
        advance();
        return *texture_from_name(name);
      }
    }
    error("expected texture name, found '" + peek().lexeme + "'",
          {"smooth", "stippled", "impasto", "transparent"});
  }

  std::string expect_string() {
    if (!at(Token::Kind::string))
      error("expected string literal, found '" + peek().lexeme + "'", {"STRING"});
    return advance().lexeme;
  }

  Stmt parse_stmt() {
    const SourcePos pos{peek().line, peek().column};
    if (at_kw("region")) return {parse_region(), pos};
    if (at_kw("state")) return {parse_state(), pos};
    if (at_kw("word")) return {parse_word(), pos};
    if (at_kw("stroke")) return {parse_stroke(), pos};
    if (at_kw("apply")) return {parse_apply(), pos};
    if (at_kw("braid")) return {parse_braid(), pos};
    if (at_kw("check")) return {parse_check(), pos};
    if (at_kw("render")) return {parse_render(), pos};
    if (at_kw("print")) return {parse_print(), pos};
    error("expected statement, found '" + peek().lexeme + "'",
          {"region", "state", "word", "stroke", "apply", "braid", "check", "render",
           "print"});
  }

  StmtNode parse_region() {
    advance();
    RegionStmt s;
    s.name = expect_ident();
    expect_kw("rect");
    s.x = expect_int();
    s.y = expect_int();
    s.width = expect_int();
    s.height = expect_int();
    return s;
  }

  StmtNode parse_state() {
    advance();
    StateStmt s;
    s.name = expect_ident();
    expect(Token::Kind::equals, "'='");
    expect_kw("paint");
    s.region = expect_ident();
    expect_kw("color");
    s.color = expect_hexcolor();
    expect_kw("texture");
    s.texture = expect_texname();
    expect_kw("load");
    s.load = expect_int();
    return s;
  }

  StmtNode parse_word() {
    advance();
    WordStmt s;
    s.name = expect_ident();
    expect(Token::Kind::equals, "'='");
    s.expr = parse_wexpr();
    return s;
  }

  WordExpr parse_wexpr() {
    WordExpr lhs = parse_wterm();
    while (at(Token::Kind::tensor)) {
      advance();
      WordExpr rhs = parse_wterm();
      WordExpr combined;
      combined.node = WordExpr::Tensor{std::make_shared<WordExpr>(std::move(lhs)),
                                       std::make_shared<WordExpr>(std::move(rhs))};
      lhs = std::move(combined);
    }
    return lhs;
  }

  WordExpr parse_wterm() {
    if (at(Token::Kind::ident)) {
      WordExpr e;
      e.node = WordExpr::Name{advance().lexeme};
      return e;
    }
    if (at_kw("I")) {
      advance();
      WordExpr e;
      e.node = WordExpr::Unit{};
      return e;
    }
    if (at(Token::Kind::lparen)) {
      advance();
      WordExpr e = parse_wexpr();
      expect(Token::Kind::rparen, "')'");
      return e;
    }
    error("expected expression, found '" + peek().lexeme + "'", {"IDENT", "I", "'('"});
  }

  StmtNode parse_stroke() {
    advance();
    StrokeStmt s;
    s.name = expect_ident();
    expect(Token::Kind::equals, "'='");
    s.gen = parse_gen();
    return s;
  }

  GenExpr parse_gen() {
    if (at_kw("set_color")) {
      advance();
      return GenSetColor{expect_hexcolor()};
    }
    if (at_kw("add_color")) {
      advance();
      GenAddColor g;
      g.color = expect_hexcolor();
      g.load = expect_int();
      return g;
    }
    if (at_kw("set_texture")) {
      advance();
      return GenSetTexture{expect_texname()};
    }
    if (at_kw("scale_load")) {
      advance();
      GenScaleLoad g;
      g.num = expect_int();
      expect(Token::Kind::slash, "'/'");
      g.den = expect_int();
      return g;
    }
    if (at_kw("do_nothing")) {
      advance();
      return GenDoNothing{};
    }
    error("expected stroke generator, found '" + peek().lexeme + "'",
          {"set_color", "add_color", "set_texture", "scale_load", "do_nothing"});
  }

  StmtNode parse_apply() {
    advance();
    ApplyStmt s;
    s.stroke = expect_ident();
    expect_kw("to");
    s.word = expect_ident();
    expect_kw("at");
    s.position = expect_int();
    return s;
  }

  StmtNode parse_braid() {
    advance();
    BraidStmt s;
    s.word = expect_ident();
    expect_kw("at");
    s.position = expect_int();
    return s;
  }

  StmtNode parse_check() {
    advance();
    expect_kw("laws");
    CheckStmt s;
    if (at_kw("seed")) {
      advance();
      s.seed = expect_int();
    }
    if (at_kw("samples")) {
      advance();
      s.samples = expect_int();
    }
    return s;
  }

  StmtNode parse_render() {
    advance();
    RenderStmt s;
    s.word = expect_ident();
    s.path = expect_string();
    if (at_kw("size")) {
      advance();
      const std::uint64_t w = expect_int();
      const std::uint64_t h = expect_int();
      s.size = {w, h};
    }
    return s;
  }

  StmtNode parse_print() {
    advance();
    PrintStmt s;
    s.word = expect_ident();
    return s;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParseResult parse_tokens(std::vector<Token> tokens) {
  return detail::Parser(std::move(tokens)).run();
}

inline ParseResult parse(std::string_view source) {
  TokenizeResult lexed = tokenize(source);
  if (lexed.error) {
    ParseResult result;
    result.errors.push_back(
        ParseError{lexed.error->message, lexed.error->line, lexed.error->column, {}});
    return result;
  }
  return parse_tokens(std::move(lexed.tokens));
}

// --- pretty printer ----------------------------------------------------------

namespace detail {

inline std::string format_wexpr(const WordExpr& e) {
  return std::visit(
      [](const auto& node) -> std::string {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, WordExpr::Name>) {
          return node.id;
        } else if constexpr (std::is_same_v<N, WordExpr::Unit>) {
          return "I";
        } else {
          // `(x)` is left-associative: the left child prints bare, a tensor on
          // the right needs parentheses to survive a re-parse unchanged.
          const std::string lhs = format_wexpr(*node.lhs);
          std::string rhs = format_wexpr(*node.rhs);
          if (std::holds_alternative<WordExpr::Tensor>(node.rhs->node))
            rhs = "(" + rhs + ")";
          return lhs + " (x) " + rhs;
        }
      },
      e.node);
}

inline std::string format_gen(const GenExpr& g) {
  return std::visit(
      [](const auto& gen) -> std::string {
        using G = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<G, GenSetColor>) {
          return "set_color " + hex_color(gen.color);
        } else if constexpr (std::is_same_v<G, GenAddColor>) {
          return "add_color " + hex_color(gen.color) + " " + std::to_string(gen.load);
        } else if constexpr (std::is_same_v<G, GenSetTexture>) {
          return "set_texture " + std::string(texture_name(gen.texture));
        } else if constexpr (std::is_same_v<G, GenScaleLoad>) {
          return "scale_load " + std::to_string(gen.num) + "/" + std::to_string(gen.den);
        } else {
          return "do_nothing";
        }
      },
      g);
}

inline std::string format_stmt(const StmtNode& node) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RegionStmt>) {
          return "region " + s.name + " rect " + std::to_string(s.x) + " " +
                 std::to_string(s.y) + " " + std::to_string(s.width) + " " +
                 std::to_string(s.height);
        } else if constexpr (std::is_same_v<S, StateStmt>) {
          return "state " + s.name + " = paint " + s.region + " color " +
                 hex_color(s.color) + " texture " + std::string(texture_name(s.texture)) +
                 " load " + std::to_string(s.load);
        } else if constexpr (std::is_same_v<S, WordStmt>) {
          return "word " + s.name + " = " + format_wexpr(s.expr);
        } else if constexpr (std::is_same_v<S, StrokeStmt>) {
          return "stroke " + s.name + " = " + format_gen(s.gen);
        } else if constexpr (std::is_same_v<S, ApplyStmt>) {
          return "apply " + s.stroke + " to " + s.word + " at " +
                 std::to_string(s.position);
        } else if constexpr (std::is_same_v<S, BraidStmt>) {
          return "braid " + s.word + " at " + std::to_string(s.position);
        } else if constexpr (std::is_same_v<S, CheckStmt>) {
          std::string out = "check laws";
          if (s.seed) out += " seed " + std::to_string(*s.seed);
          if (s.samples) out += " samples " + std::to_string(*s.samples);
          return out;
        } else if constexpr (std::is_same_v<S, RenderStmt>) {
          std::string out = "render " + s.word + " \"" + s.path + "\"";
          if (s.size)
            out += " size " + std::to_string(s.size->first) + " " +
                   std::to_string(s.size->second);
          return out;
        } else {
          static_assert(std::is_same_v<S, PrintStmt>);
          return "print " + s.word;
        }
      },
      node);
}

}  // namespace detail

/// Canonical source text: one statement per line, comments dropped, colors in
/// canonical hex. Re-parsing the output yields an equal AST.
inline std::string pretty_print(const Script& script) {
  std::string out;
  for (const Stmt& stmt : script.stmts) {
    out += detail::format_stmt(stmt.node);
    out += '\n';
  }
  return out;
}

// --- evaluation ----------------------------------------------------------------

class eval_error : public std::runtime_error {
 public:
  eval_error(const std::string& message, SourcePos pos)
      : std::runtime_error(message), pos_(pos) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

struct EvalOptions {
  std::ostream* out = &std::cout;            // print/check payloads
  std::filesystem::path output_dir = ".";    // base for relative render paths
  std::optional<std::uint64_t> default_seed;     // used when `check laws` has no seed
  std::optional<std::uint64_t> default_samples;  // likewise for samples
};

struct EvalResult {
  int checks_run = 0;
  int checks_failed = 0;
  std::vector<std::filesystem::path> rendered_files;
  std::optional<std::string> last_render_word;
  std::optional<std::string> last_bound_word;
};

inline constexpr std::uint64_t default_law_seed = 42;
inline constexpr std::size_t default_law_samples = 64;

namespace detail {

// Region coordinates and render sizes are bounded so pixel arithmetic stays
// comfortably inside int range.
inline constexpr std::uint64_t max_region_coord = 1'000'000;
inline constexpr std::uint64_t max_render_dim = 8192;

using Binding = std::variant<PaintState, TensorWord, StrokeGen>;

struct Env {
  RegionRegistry regions;
  std::map<std::string, Binding> names;
};

inline TensorWord eval_wexpr(const WordExpr& expr, const Env& env, SourcePos pos) {
  return std::visit(
      [&env, pos](const auto& node) -> TensorWord {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, WordExpr::Name>) {
          const auto it = env.names.find(node.id);
          if (it == env.names.end())
            throw eval_error("unbound identifier '" + node.id + "'", pos);
          if (const auto* state = std::get_if<PaintState>(&it->second))
            return singleton_word(*state);
          if (const auto* word = std::get_if<TensorWord>(&it->second)) return *word;
          throw eval_error("'" + node.id + "' names a stroke, not a state or word", pos);
        } else if constexpr (std::is_same_v<N, WordExpr::Unit>) {
          return unit_word();
        } else {
          return tensor_words(eval_wexpr(*node.lhs, env, pos),
                              eval_wexpr(*node.rhs, env, pos));
        }
      },
      expr.node);
}

inline StrokeGen eval_gen(const GenExpr& gen, SourcePos pos) {
  return std::visit(
      [pos](const auto& g) -> StrokeGen {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, GenSetColor>) {
          return SetColor{g.color};
        } else if constexpr (std::is_same_v<G, GenAddColor>) {
          if (g.load > Load::max_value)
            throw eval_error("load " + std::to_string(g.load) + " outside [0, 256]", pos);
          return AddColor{g.color, Load(static_cast<int>(g.load))};
        } else if constexpr (std::is_same_v<G, GenSetTexture>) {
          return SetTexture(g.texture);
        } else if constexpr (std::is_same_v<G, GenScaleLoad>) {
          if (g.den == 0) throw eval_error("scale_load denominator must be positive", pos);
          if (g.num > 1'000'000 || g.den > 1'000'000)
            throw eval_error("scale_load fraction out of range", pos);
          return ScaleLoad(static_cast<long long>(g.num), static_cast<long long>(g.den));
        } else {
          return DoNothing{};
        }
      },
      gen);
}

inline TensorWord& lookup_word(Env& env, const std::string& name, SourcePos pos) {
  const auto it = env.names.find(name);
  if (it == env.names.end()) throw eval_error("unbound identifier '" + name + "'", pos);
  TensorWord* word = std::get_if<TensorWord>(&it->second);
  if (!word) throw eval_error("'" + name + "' is not bound to a word", pos);
  return *word;
}

}  // namespace detail

/// Runs the script top to bottom. `print` and `check laws` write one JSON line
/// each to `opts.out`; `render` writes PPM files under `opts.output_dir` for
/// relative paths. Every failure is reported as an eval_error carrying the
/// offending statement's position.
inline EvalResult eval_script(const Script& script, const EvalOptions& opts = {}) {
  detail::Env env;
  EvalResult result;

  const auto exec = [&](const Stmt& stmt) {
    const SourcePos pos = stmt.pos;
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, RegionStmt>) {
            if (s.x > detail::max_region_coord || s.y > detail::max_region_coord ||
                s.width > detail::max_region_coord || s.height > detail::max_region_coord)
              throw eval_error("region geometry out of range", pos);
            env.regions.add(Region{s.name, Rect{static_cast<int>(s.x),
                                                static_cast<int>(s.y),
                                                static_cast<int>(s.width),
                                                static_cast<int>(s.height)}});
          } else if constexpr (std::is_same_v<S, StateStmt>) {
            if (!env.regions.contains(s.region))
              throw eval_error("unbound region '" + s.region + "'", pos);
            if (s.load > Load::max_value)
              throw eval_error("load " + std::to_string(s.load) + " outside [0, 256]", pos);
            env.names.insert_or_assign(
                s.name,
                PaintState(s.region, s.color, s.texture, Load(static_cast<int>(s.load))));
          } else if constexpr (std::is_same_v<S, WordStmt>) {
            env.names.insert_or_assign(s.name, detail::eval_wexpr(s.expr, env, pos));
            result.last_bound_word = s.name;
          } else if constexpr (std::is_same_v<S, StrokeStmt>) {
            env.names.insert_or_assign(s.name, detail::eval_gen(s.gen, pos));
          } else if constexpr (std::is_same_v<S, ApplyStmt>) {
            const auto it = env.names.find(s.stroke);
            if (it == env.names.end())
              throw eval_error("unbound identifier '" + s.stroke + "'", pos);
            const StrokeGen* gen = std::get_if<StrokeGen>(&it->second);
            if (!gen)
              throw eval_error("'" + s.stroke + "' is not bound to a stroke", pos);
            TensorWord& word = detail::lookup_word(env, s.word, pos);
            if (s.position >= word.size())
              throw eval_error("apply position " + std::to_string(s.position) +
                                   " out of range for word of length " +
                                   std::to_string(word.size()),
                               pos);
            word = stroke_morphism(word, static_cast<std::size_t>(s.position), *gen)
                       .target();
            result.last_bound_word = s.word;
          } else if constexpr (std::is_same_v<S, BraidStmt>) {
            TensorWord& word = detail::lookup_word(env, s.word, pos);
            if (word.size() < 2 || s.position > word.size() - 2)
              throw eval_error("braid position " + std::to_string(s.position) +
                                   " out of range for word of length " +
                                   std::to_string(word.size()),
                               pos);
            word = braid(word, static_cast<std::size_t>(s.position)).target();
            result.last_bound_word = s.word;
          } else if constexpr (std::is_same_v<S, CheckStmt>) {
            laws::LawCheckConfig cfg;
            cfg.seed = s.seed.value_or(opts.default_seed.value_or(default_law_seed));
            const std::uint64_t samples =
                s.samples.value_or(opts.default_samples.value_or(default_law_samples));
            if (samples < 1 || samples > 1'000'000)
              throw eval_error("samples must be within [1, 1000000]", pos);
            cfg.samples = static_cast<std::size_t>(samples);
            cfg.region_pool = env.regions.regions();
            if (cfg.region_pool.empty())
              throw eval_error("check laws needs at least one declared region", pos);
            const laws::LawReport report = laws::run_all(cfg);
            *opts.out << laws::report_json_text(report) << '\n';
            ++result.checks_run;
            if (!report.passed) ++result.checks_failed;
          } else if constexpr (std::is_same_v<S, RenderStmt>) {
            const TensorWord& word = detail::lookup_word(env, s.word, pos);
            int width = 0;
            int height = 0;
            if (s.size) {
              if (s.size->first < 1 || s.size->first > detail::max_render_dim ||
                  s.size->second < 1 || s.size->second > detail::max_render_dim)
                throw eval_error("render size out of range", pos);
              width = static_cast<int>(s.size->first);
              height = static_cast<int>(s.size->second);
            } else {
              // Smallest image covering every declared region; 1x1 ground when
              // nothing is declared.
              for (const Region& r : env.regions.regions()) {
                width = std::max(width, r.bounds.x + r.bounds.width);
                height = std::max(height, r.bounds.y + r.bounds.height);
              }
              width = std::max(width, 1);
              height = std::max(height, 1);
            }
            const CanvasState canvas = eval_word(word, env.regions);
            const render::Image img = render::rasterize(canvas, env.regions, width, height);
            std::filesystem::path path(s.path);
            if (path.is_relative()) path = opts.output_dir / path;
            render::write_ppm_file(img, path);
            result.rendered_files.push_back(path);
            result.last_render_word = s.word;
          } else {
            static_assert(std::is_same_v<S, PrintStmt>);
            const TensorWord& word = detail::lookup_word(env, s.word, pos);
            *opts.out << canvas_json_text(eval_word(word, env.regions)) << '\n';
          }
        },
        stmt.node);
  };

  for (const Stmt& stmt : script.stmts) {
    try {
      exec(stmt);
    } catch (const eval_error&) {
      throw;
    } catch (const std::exception& e) {
      throw eval_error(e.what(), stmt.pos);
    }
  }
  return result;
}

}  // namespace paint::dsl
