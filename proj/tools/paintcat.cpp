// paintcat: run stroke-program scripts, check the categorical laws, render
// canvases and format scripts.
//
// Exit codes: 0 success (and all laws passed), 1 a law check failed,
// 2 usage, parse or evaluation error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "paint/paint.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_law_failure = 1;
constexpr int exit_usage = 2;

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void print_parse_errors(const std::string& file, const paint::dsl::ParseResult& parsed) {
  for (const paint::dsl::ParseError& e : parsed.errors) {
    std::cerr << file << ":" << e.line << ":" << e.column << ": error: " << e.message;
    if (!e.expected.empty()) {
      std::cerr << " (expected:";
      for (const std::string& x : e.expected) std::cerr << " " << x;
      std::cerr << ")";
    }
    std::cerr << "\n";
  }
}

std::optional<paint::dsl::Script> load_script(const std::string& file) {
  const auto text = read_file(file);
  if (!text) {
    std::cerr << "error: cannot read '" << file << "'\n";
    return std::nullopt;
  }
  paint::dsl::ParseResult parsed = paint::dsl::parse(*text);
  if (!parsed.ok()) {
    print_parse_errors(file, parsed);
    return std::nullopt;
  }
  return std::move(parsed.script);
}

paint::RegionRegistry builtin_pool() {
  paint::RegionRegistry regs;
  regs.add(paint::Region{"R1", paint::Rect{0, 0, 32, 32}});
  regs.add(paint::Region{"R2", paint::Rect{32, 0, 32, 32}});
  regs.add(paint::Region{"R3", paint::Rect{0, 32, 64, 32}});
  return regs;
}

int run_script(const std::string& file, std::optional<std::uint64_t> seed,
               std::optional<std::uint64_t> samples) {
  const auto script = load_script(file);
  if (!script) return exit_usage;
  paint::dsl::EvalOptions opts;
  opts.default_seed = seed;
  opts.default_samples = samples;
  try {
    const paint::dsl::EvalResult result = paint::dsl::eval_script(*script, opts);
    return result.checks_failed > 0 ? exit_law_failure : exit_ok;
  } catch (const paint::dsl::eval_error& e) {
    std::cerr << file << ":" << e.pos().line << ":" << e.pos().column
              << ": error: " << e.what() << "\n";
    return exit_usage;
  }
}

int run_check(std::uint64_t seed, std::uint64_t samples) {
  paint::laws::LawCheckConfig cfg;
  cfg.seed = seed;
  cfg.samples = static_cast<std::size_t>(samples);
  cfg.region_pool = builtin_pool().regions();
  const paint::laws::LawReport report = paint::laws::run_all(cfg);
  std::cout << paint::laws::report_json_text(report) << "\n";
  return report.passed ? exit_ok : exit_law_failure;
}

int run_render(const std::string& file, const std::string& output,
               std::optional<std::pair<std::uint64_t, std::uint64_t>> size,
               std::optional<std::uint64_t> seed) {
  const auto text = read_file(file);
  if (!text) {
    std::cerr << "error: cannot read '" << file << "'\n";
    return exit_usage;
  }
  paint::dsl::ParseResult parsed = paint::dsl::parse(*text);
  if (!parsed.ok()) {
    print_parse_errors(file, parsed);
    return exit_usage;
  }
  // Re-run the script with an extra render of its final word aimed at the
  // requested output path: the word of the last render statement, or the most
  // recently bound word when the script never renders.
  paint::dsl::EvalOptions opts;
  opts.default_seed = seed;
  int law_failures = 0;
  try {
    const paint::dsl::EvalResult result = paint::dsl::eval_script(parsed.script, opts);
    law_failures = result.checks_failed;
    const std::optional<std::string> word =
        result.last_render_word ? result.last_render_word : result.last_bound_word;
    if (!word) {
      std::cerr << "error: script binds no word to render\n";
      return exit_usage;
    }
    paint::dsl::Script tail = parsed.script;
    paint::dsl::RenderStmt extra;
    extra.word = *word;
    extra.path = output;
    if (size) extra.size = *size;
    tail.stmts.push_back(paint::dsl::Stmt{extra, paint::dsl::SourcePos{0, 0}});
    // Silence the script's own prints/checks on the second pass.
    std::ostringstream sink;
    paint::dsl::EvalOptions quiet = opts;
    quiet.out = &sink;
    paint::dsl::eval_script(tail, quiet);
  } catch (const paint::dsl::eval_error& e) {
    std::cerr << file << ":" << e.pos().line << ":" << e.pos().column
              << ": error: " << e.what() << "\n";
    return exit_usage;
  }
  return law_failures > 0 ? exit_law_failure : exit_ok;
}

int run_fmt(const std::string& file) {
  const auto text = read_file(file);
  if (!text) {
    std::cerr << "error: cannot read '" << file << "'\n";
    return exit_usage;
  }
  paint::dsl::ParseResult parsed = paint::dsl::parse(*text);
  if (!parsed.ok()) {
    print_parse_errors(file, parsed);
    return exit_usage;
  }
  std::cout << paint::dsl::pretty_print(parsed.script);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paintcat — a strict braided monoidal category of painting"};
  app.require_subcommand(1);

  std::string script_file;
  std::string output_file;
  std::uint64_t seed = paint::dsl::default_law_seed;
  std::uint64_t samples = paint::dsl::default_law_samples;
  std::vector<std::uint64_t> size_values;

  CLI::App* run = app.add_subcommand("run", "execute a stroke-program script");
  run->add_option("script", script_file, "script file")->required();
  auto* run_seed = run->add_option("--seed", seed, "default seed for check laws")
                       ->envname("PAINTCAT_SEED");
  auto* run_samples = run->add_option("--samples", samples, "default samples for check laws")
                          ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1000000}));

  CLI::App* check = app.add_subcommand("check", "run the law suite on a built-in canvas");
  auto* check_seed = check->add_option("--seed", seed, "law suite seed")
                         ->envname("PAINTCAT_SEED");
  check->add_option("--samples", samples, "samples per law")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1000000}));

  CLI::App* render = app.add_subcommand("render", "execute a script and render its final word");
  render->add_option("script", script_file, "script file")->required();
  render->add_option("-o,--output", output_file, "output PPM path")->required();
  render->add_option("--size", size_values, "image size (width height)")->expected(2);
  auto* render_seed = render->add_option("--seed", seed, "default seed for check laws")
                          ->envname("PAINTCAT_SEED");

  CLI::App* fmt = app.add_subcommand("fmt", "print the canonical form of a script");
  fmt->add_option("script", script_file, "script file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return exit_ok;
    }
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (run->parsed()) {
      return run_script(script_file,
                        *run_seed ? std::optional<std::uint64_t>(seed) : std::nullopt,
                        *run_samples ? std::optional<std::uint64_t>(samples) : std::nullopt);
    }
    if (check->parsed()) {
      (void)check_seed;
      return run_check(seed, samples);
    }
    if (render->parsed()) {
      std::optional<std::pair<std::uint64_t, std::uint64_t>> size;
      if (size_values.size() == 2) {
        if (size_values[0] < 1 || size_values[1] < 1) {
          std::cerr << "error: --size values must be at least 1\n";
          return exit_usage;
        }
        size = {size_values[0], size_values[1]};
      }
      return run_render(script_file, output_file, size,
                        *render_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    return run_fmt(script_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
