#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "paint/dsl.hpp"

using namespace paint;
namespace fs = std::filesystem;

namespace {

const char* const quickstart = R"(region R1 rect 0 0 32 32
region R2 rect 32 0 32 32
state s1 = paint R1 color #CC2222 texture smooth load 200
state s2 = paint R1 color #2233CC texture transparent load 128
state s3 = paint R2 color #22CC55 texture impasto load 256
word w = s1 (x) s2 (x) s3
braid w at 0
render w "out.ppm" size 64 32
check laws seed 42 samples 64
print w
)";

fs::path make_temp_dir() {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("paint_dsl_test_" + std::to_string(++counter) + "_" +
                                   std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::vector<dsl::Token::Kind> kinds_of(const std::string& src) {
  const dsl::TokenizeResult lexed = dsl::tokenize(src);
  REQUIRE(lexed.ok());
  std::vector<dsl::Token::Kind> kinds;
  for (const dsl::Token& t : lexed.tokens) kinds.push_back(t.kind);
  return kinds;
}

}  // namespace

TEST_CASE("tokenizer produces the expected kinds", "[dsl]") {
  using K = dsl::Token::Kind;
  CHECK(kinds_of("word w = s1 (x) s2") ==
        std::vector<K>{K::keyword, K::ident, K::equals, K::ident, K::tensor, K::ident,
                       K::eof});
  CHECK(kinds_of("color #CC2222") == std::vector<K>{K::keyword, K::hexcolor, K::eof});
  CHECK(kinds_of("render w \"out.ppm\"") ==
        std::vector<K>{K::keyword, K::ident, K::string, K::eof});
  CHECK(kinds_of("w \xE2\x8A\x97 v") ==
        std::vector<K>{K::ident, K::tensor, K::ident, K::eof});
  CHECK(kinds_of("scale_load 1/2") ==
        std::vector<K>{K::keyword, K::integer, K::slash, K::integer, K::eof});
}

TEST_CASE("a lone hash is an empty comment, not a token", "[dsl]") {
  CHECK(kinds_of("#") == std::vector<dsl::Token::Kind>{dsl::Token::Kind::eof});
  CHECK(kinds_of("# a comment\nprint w").front() == dsl::Token::Kind::newline);
}

TEST_CASE("tokenizer tracks positions", "[dsl]") {
  const dsl::TokenizeResult lexed = dsl::tokenize("word w\nbraid w at 0");
  REQUIRE(lexed.ok());
  CHECK(lexed.tokens[0].line == 1);
  CHECK(lexed.tokens[0].column == 1);
  CHECK(lexed.tokens[1].column == 6);
  CHECK(lexed.tokens[3].line == 2);  // "braid", after the newline token
  CHECK(lexed.tokens[3].column == 1);
}

TEST_CASE("lexical errors carry positions", "[dsl]") {
  const dsl::TokenizeResult bad_char = dsl::tokenize("word w = s1 $ s2");
  REQUIRE_FALSE(bad_char.ok());
  CHECK(bad_char.error->column == 13);

  const dsl::TokenizeResult bad_color = dsl::tokenize("state s = paint R1 color #CC22");
  REQUIRE_FALSE(bad_color.ok());
  CHECK(bad_color.error->message.find("hex color") != std::string::npos);

  const dsl::TokenizeResult long_color = dsl::tokenize("color #CC2222AB");
  REQUIRE_FALSE(long_color.ok());

  const dsl::TokenizeResult bad_string = dsl::tokenize("render w \"out.ppm");
  REQUIRE_FALSE(bad_string.ok());
  CHECK(bad_string.error->message.find("string") != std::string::npos);
}

TEST_CASE("quickstart parses to one statement per line", "[dsl]") {
  const dsl::ParseResult parsed = dsl::parse(quickstart);
  REQUIRE(parsed.ok());
  REQUIRE(parsed.script.stmts.size() == 10);
  CHECK(std::holds_alternative<dsl::RegionStmt>(parsed.script.stmts[0].node));
  CHECK(std::holds_alternative<dsl::StateStmt>(parsed.script.stmts[2].node));
  CHECK(std::holds_alternative<dsl::WordStmt>(parsed.script.stmts[5].node));
  CHECK(std::holds_alternative<dsl::BraidStmt>(parsed.script.stmts[6].node));
  CHECK(std::holds_alternative<dsl::RenderStmt>(parsed.script.stmts[7].node));
  CHECK(std::holds_alternative<dsl::CheckStmt>(parsed.script.stmts[8].node));
}

TEST_CASE("binding is an evaluation concern, not a parse concern", "[dsl]") {
  const dsl::ParseResult parsed =
      dsl::parse("state s = paint R9 color #112233 texture smooth load 10\n");
  REQUIRE(parsed.ok());
  CHECK_THROWS_AS(dsl::eval_script(parsed.script), dsl::eval_error);
  try {
    dsl::eval_script(parsed.script);
  } catch (const dsl::eval_error& e) {
    CHECK(e.pos().line == 1);
    CHECK(std::string(e.what()).find("R9") != std::string::npos);
  }
}

TEST_CASE("a leading tensor is a parse error with an expected set", "[dsl]") {
  const dsl::ParseResult parsed = dsl::parse("word w = (x) s1\n");
  REQUIRE_FALSE(parsed.ok());
  CHECK(parsed.errors[0].line == 1);
  CHECK(parsed.errors[0].column == 10);
  CHECK_FALSE(parsed.errors[0].expected.empty());
}

TEST_CASE("the parser recovers at statement boundaries", "[dsl]") {
  const dsl::ParseResult parsed = dsl::parse(
      "region R1 rect 0 0 4 4\n"
      "word = s1\n"
      "print w extra tokens\n"
      "print w\n");
  CHECK(parsed.errors.size() == 2);
  CHECK(parsed.script.stmts.size() == 2);  // region + final print survive
}

TEST_CASE("error collection is capped", "[dsl]") {
  std::string bad;
  for (int i = 0; i < 25; ++i) bad += "word = broken\n";
  const dsl::ParseResult parsed = dsl::parse(bad);
  CHECK(parsed.errors.size() == 10);
}

TEST_CASE("pretty print reaches a fixpoint on the quickstart", "[dsl]") {
  const dsl::ParseResult first = dsl::parse(quickstart);
  REQUIRE(first.ok());
  const std::string formatted = dsl::pretty_print(first.script);
  const dsl::ParseResult second = dsl::parse(formatted);
  REQUIRE(second.ok());
  CHECK(dsl::ast_equal(first.script, second.script));
  CHECK(dsl::pretty_print(second.script) == formatted);
}

TEST_CASE("pretty print drops comments and normalizes whitespace", "[dsl]") {
  const dsl::ParseResult messy = dsl::parse(
      "  region   R1   rect 0 0 4 4   # trailing comment\n"
      "\n"
      "# full-line comment\n"
      "word w =   I\n");
  REQUIRE(messy.ok());
  CHECK(dsl::pretty_print(messy.script) == "region R1 rect 0 0 4 4\nword w = I\n");
}

TEST_CASE("pretty print parenthesizes only right-nested tensors", "[dsl]") {
  const dsl::ParseResult right = dsl::parse("word w = a (x) (b (x) c)\n");
  REQUIRE(right.ok());
  CHECK(dsl::pretty_print(right.script) == "word w = a (x) (b (x) c)\n");

  const dsl::ParseResult left = dsl::parse("word w = ((a (x) b)) (x) c\n");
  REQUIRE(left.ok());
  CHECK(dsl::pretty_print(left.script) == "word w = a (x) b (x) c\n");

  for (const std::string text : {"word w = a (x) (b (x) c)\n", "word w = (a ⊗ b) ⊗ c\n",
                                 "word w = I (x) a (x) I\n", "word w = (a)\n"}) {
    const dsl::ParseResult p1 = dsl::parse(text);
    REQUIRE(p1.ok());
    const dsl::ParseResult p2 = dsl::parse(dsl::pretty_print(p1.script));
    REQUIRE(p2.ok());
    CHECK(dsl::ast_equal(p1.script, p2.script));
  }
}

TEST_CASE("empty script pretty prints to the empty string", "[dsl]") {
  const dsl::ParseResult parsed = dsl::parse("");
  REQUIRE(parsed.ok());
  CHECK(parsed.script.stmts.empty());
  CHECK(dsl::pretty_print(parsed.script).empty());
}

TEST_CASE("quickstart evaluates end to end", "[dsl]") {
  const fs::path dir = make_temp_dir();
  const dsl::ParseResult parsed = dsl::parse(quickstart);
  REQUIRE(parsed.ok());

  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  opts.output_dir = dir;
  const dsl::EvalResult result = dsl::eval_script(parsed.script, opts);

  CHECK(result.checks_run == 1);
  CHECK(result.checks_failed == 0);
  REQUIRE(result.rendered_files.size() == 1);
  CHECK(fs::exists(result.rendered_files[0]));
  CHECK(result.last_render_word == "w");

  // two JSON lines: the law report, then the printed canvas
  std::istringstream lines(out.str());
  std::string report_line;
  std::string canvas_line;
  REQUIRE(std::getline(lines, report_line));
  REQUIRE(std::getline(lines, canvas_line));
  const auto report = nlohmann::json::parse(report_line);
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("seed").get<std::uint64_t>() == 42);
  const auto canvas = nlohmann::json::parse(canvas_line);
  // braid moved s2 first: R1 = layer(s2, s1), textures: load 200 >= 128 -> smooth
  CHECK(canvas.at("R1").at("texture").get<std::string>() == "smooth");
  CHECK(canvas.at("R2").at("color").get<std::string>() == "#22CC55");

  fs::remove_all(dir);
}

TEST_CASE("braiding twice restores the original word", "[dsl]") {
  const std::string script =
      "region R1 rect 0 0 4 4\n"
      "region R2 rect 4 0 4 4\n"
      "state a = paint R1 color #FF0000 texture smooth load 200\n"
      "state b = paint R2 color #0000FF texture impasto load 100\n"
      "word w = a (x) b\n"
      "print w\n"
      "braid w at 0\n"
      "braid w at 0\n"
      "print w\n";
  const dsl::ParseResult parsed = dsl::parse(script);
  REQUIRE(parsed.ok());
  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  dsl::eval_script(parsed.script, opts);
  std::istringstream lines(out.str());
  std::string first;
  std::string second;
  REQUIRE(std::getline(lines, first));
  REQUIRE(std::getline(lines, second));
  CHECK(first == second);
}

TEST_CASE("apply rewrites one factor in place", "[dsl]") {
  const std::string script =
      "region R1 rect 0 0 4 4\n"
      "state a = paint R1 color #FF0000 texture smooth load 200\n"
      "word w = a\n"
      "stroke f = set_texture stippled\n"
      "apply f to w at 0\n"
      "print w\n";
  const dsl::ParseResult parsed = dsl::parse(script);
  REQUIRE(parsed.ok());
  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  dsl::eval_script(parsed.script, opts);
  CHECK(out.str() == "{\"R1\":{\"color\":\"#FF0000\",\"texture\":\"stippled\"}}\n");
}

TEST_CASE("rendering an empty word with no regions yields a 1x1 ground image", "[dsl]") {
  const fs::path dir = make_temp_dir();
  const dsl::ParseResult parsed = dsl::parse("word w = I\nrender w \"blank.ppm\"\n");
  REQUIRE(parsed.ok());
  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  opts.output_dir = dir;
  dsl::eval_script(parsed.script, opts);
  std::ifstream f(dir / "blank.ppm", std::ios::binary);
  std::stringstream bytes;
  bytes << f.rdbuf();
  CHECK(bytes.str() == std::string("P6\n1 1\n255\n\xFF\xFF\xFF", 14));
  fs::remove_all(dir);
}

TEST_CASE("evaluation errors carry statement positions", "[dsl]") {
  const auto eval_line = [](const std::string& script) -> std::pair<int, std::string> {
    const dsl::ParseResult parsed = dsl::parse(script);
    REQUIRE(parsed.ok());
    std::ostringstream out;
    dsl::EvalOptions opts;
    opts.out = &out;
    opts.output_dir = fs::temp_directory_path();
    try {
      dsl::eval_script(parsed.script, opts);
    } catch (const dsl::eval_error& e) {
      return {e.pos().line, e.what()};
    }
    return {0, ""};
  };

  SECTION("unbound identifier") {
    const auto [line, msg] = eval_line("region R1 rect 0 0 4 4\nword w = ghost\n");
    CHECK(line == 2);
    CHECK(msg.find("unbound identifier 'ghost'") != std::string::npos);
  }
  SECTION("region overlap") {
    const auto [line, msg] =
        eval_line("region R1 rect 0 0 4 4\nregion R2 rect 2 2 4 4\n");
    CHECK(line == 2);
    CHECK(msg.find("overlaps") != std::string::npos);
  }
  SECTION("duplicate region") {
    const auto [line, msg] =
        eval_line("region R1 rect 0 0 4 4\nregion R1 rect 8 0 4 4\n");
    CHECK(line == 2);
  }
  SECTION("braid position out of range") {
    const auto [line, msg] = eval_line(
        "region R1 rect 0 0 4 4\n"
        "state a = paint R1 color #FF0000 texture smooth load 10\n"
        "word w = a\n"
        "braid w at 0\n");
    CHECK(line == 4);
    CHECK(msg.find("out of range") != std::string::npos);
  }
  SECTION("apply position out of range") {
    const auto [line, msg] = eval_line(
        "region R1 rect 0 0 4 4\n"
        "state a = paint R1 color #FF0000 texture smooth load 10\n"
        "word w = a\n"
        "stroke f = do_nothing\n"
        "apply f to w at 3\n");
    CHECK(line == 5);
  }
  SECTION("load out of range") {
    const auto [line, msg] =
        eval_line("region R1 rect 0 0 4 4\nstate a = paint R1 color #FF0000 texture smooth load 300\n");
    CHECK(line == 2);
    CHECK(msg.find("load") != std::string::npos);
  }
  SECTION("scale_load zero denominator") {
    const auto [line, msg] = eval_line("stroke f = scale_load 1/0\n");
    CHECK(line == 1);
  }
  SECTION("print of a non-word") {
    const auto [line, msg] = eval_line(
        "region R1 rect 0 0 4 4\n"
        "state a = paint R1 color #FF0000 texture smooth load 10\n"
        "print a\n");
    CHECK(line == 3);
    CHECK(msg.find("not bound to a word") != std::string::npos);
  }
  SECTION("check laws with no regions") {
    const auto [line, msg] = eval_line("check laws samples 1\n");
    CHECK(line == 1);
  }
  SECTION("render size out of range") {
    const auto [line, msg] = eval_line("word w = I\nrender w \"x.ppm\" size 0 4\n");
    CHECK(line == 2);
  }
}

TEST_CASE("word expressions accept states, words and the unit", "[dsl]") {
  const std::string script =
      "region R1 rect 0 0 4 4\n"
      "region R2 rect 4 0 4 4\n"
      "state a = paint R1 color #FF0000 texture smooth load 64\n"
      "state b = paint R2 color #00FF00 texture impasto load 64\n"
      "word v = a (x) b\n"
      "word w = I (x) v (x) a (x) I\n"
      "print w\n";
  const dsl::ParseResult parsed = dsl::parse(script);
  REQUIRE(parsed.ok());
  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  dsl::eval_script(parsed.script, opts);
  const auto canvas = nlohmann::json::parse(out.str());
  CHECK(canvas.size() == 2);
}

TEST_CASE("script evaluation is deterministic", "[dsl]") {
  const std::string script =
      "region R1 rect 0 0 8 8\n"
      "check laws seed 11 samples 8\n";
  const dsl::ParseResult parsed = dsl::parse(script);
  REQUIRE(parsed.ok());
  const auto run_once = [&parsed] {
    std::ostringstream out;
    dsl::EvalOptions opts;
    opts.out = &out;
    dsl::eval_script(parsed.script, opts);
    return out.str();
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("check laws picks up default seed from options when unstated", "[dsl]") {
  const dsl::ParseResult parsed = dsl::parse("region R1 rect 0 0 8 8\ncheck laws samples 2\n");
  REQUIRE(parsed.ok());
  std::ostringstream out;
  dsl::EvalOptions opts;
  opts.out = &out;
  opts.default_seed = 99;
  dsl::eval_script(parsed.script, opts);
  const auto report = nlohmann::json::parse(out.str());
  CHECK(report.at("seed").get<std::uint64_t>() == 99);
}
