#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "paint/dsl.hpp"

// End-to-end checks of the installed binary; PAINTCAT_BIN and PAINT_SOURCE_DIR
// come from the build system.

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CmdResult run_cmd(const std::string& cmd) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const std::string tag = std::to_string(++counter);
  const fs::path out_file = dir / ("paint_cli_out_" + tag);
  const fs::path err_file = dir / ("paint_cli_err_" + tag);
  const std::string full =
      cmd + " > " + out_file.string() + " 2> " + err_file.string();
  const int status = std::system(full.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return result;
}

const std::string bin = PAINTCAT_BIN;
const fs::path source_dir = PAINT_SOURCE_DIR;

}  // namespace

TEST_CASE("check prints a passing report and exits 0", "[cli]") {
  const CmdResult r = run_cmd(bin + " check --seed 42 --samples 16");
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
  const auto report = nlohmann::json::parse(r.out);
  CHECK(report.at("passed").get<bool>());
  CHECK(report.at("seed").get<std::uint64_t>() == 42);
  CHECK(report.at("laws").size() == 8);
}

TEST_CASE("check is byte-deterministic", "[cli]") {
  const CmdResult a = run_cmd(bin + " check --seed 5 --samples 8");
  const CmdResult b = run_cmd(bin + " check --seed 5 --samples 8");
  CHECK(a.out == b.out);
}

TEST_CASE("PAINTCAT_SEED supplies the default seed and the flag wins", "[cli]") {
  const CmdResult env_only = run_cmd("PAINTCAT_SEED=7 " + bin + " check --samples 4");
  CHECK(env_only.exit_code == 0);
  CHECK(nlohmann::json::parse(env_only.out).at("seed").get<std::uint64_t>() == 7);

  const CmdResult flag_wins =
      run_cmd("PAINTCAT_SEED=7 " + bin + " check --samples 4 --seed 9");
  CHECK(nlohmann::json::parse(flag_wins.out).at("seed").get<std::uint64_t>() == 9);
}

TEST_CASE("run executes the quickstart and writes its render", "[cli]") {
  const fs::path dir = fs::temp_directory_path() / "paint_cli_run";
  fs::create_directories(dir);
  const fs::path script = source_dir / "examples" / "quickstart.paint";
  const CmdResult r = run_cmd("cd " + dir.string() + " && " + bin + " run " + script.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "out.ppm"));

  std::istringstream lines(r.out);
  std::string report_line;
  std::string canvas_line;
  REQUIRE(std::getline(lines, report_line));
  REQUIRE(std::getline(lines, canvas_line));
  CHECK(nlohmann::json::parse(report_line).at("passed").get<bool>());
  CHECK(nlohmann::json::parse(canvas_line).contains("R1"));
  fs::remove_all(dir);
}

TEST_CASE("run on a missing script exits 2", "[cli]") {
  const CmdResult r = run_cmd(bin + " run this_file_does_not_exist.paint");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("parse errors are reported with positions and exit 2", "[cli]") {
  const fs::path bad = fs::temp_directory_path() / "paint_cli_bad.paint";
  std::ofstream(bad) << "word w = (x) s1\n";
  const CmdResult r = run_cmd(bin + " run " + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find(":1:10:") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("evaluation errors are reported with positions and exit 2", "[cli]") {
  const fs::path bad = fs::temp_directory_path() / "paint_cli_unbound.paint";
  std::ofstream(bad) << "region R1 rect 0 0 4 4\nword w = ghost\n";
  const CmdResult r = run_cmd(bin + " run " + bad.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find(":2:") != std::string::npos);
  CHECK(r.err.find("ghost") != std::string::npos);
  fs::remove(bad);
}

TEST_CASE("fmt prints canonical source that reparses to the same AST", "[cli]") {
  const fs::path script = source_dir / "examples" / "quickstart.paint";
  const CmdResult r = run_cmd(bin + " fmt " + script.string());
  REQUIRE(r.exit_code == 0);

  const paint::dsl::ParseResult original = paint::dsl::parse(slurp(script));
  const paint::dsl::ParseResult formatted = paint::dsl::parse(r.out);
  REQUIRE(original.ok());
  REQUIRE(formatted.ok());
  CHECK(paint::dsl::ast_equal(original.script, formatted.script));
}

TEST_CASE("render writes the final word to the requested path", "[cli]") {
  const fs::path dir = fs::temp_directory_path() / "paint_cli_render";
  fs::create_directories(dir);
  const fs::path script = dir / "scene.paint";
  std::ofstream(script) << "region R1 rect 0 0 4 4\n"
                           "state a = paint R1 color #FF0000 texture smooth load 200\n"
                           "word w = a\n";
  const fs::path out = dir / "scene.ppm";
  const CmdResult r = run_cmd("cd " + dir.string() + " && " + bin + " render " +
                              script.string() + " -o " + out.string() + " --size 4 4");
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out));
  const std::string bytes = slurp(out);
  CHECK(bytes.substr(0, 11) == "P6\n4 4\n255\n");
  // top-left pixel is inside R1 and smooth red
  CHECK(static_cast<unsigned char>(bytes[11]) == 255);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0);
  CHECK(static_cast<unsigned char>(bytes[13]) == 0);
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit 2", "[cli]") {
  CHECK(run_cmd(bin).exit_code == 2);
  CHECK(run_cmd(bin + " frobnicate").exit_code == 2);
  CHECK(run_cmd(bin + " check --no-such-flag").exit_code == 2);
  CHECK(run_cmd(bin + " check --samples 0").exit_code == 2);
  CHECK(run_cmd(bin + " render missing.paint").exit_code == 2);  // -o is required
}

TEST_CASE("help exits 0", "[cli]") {
  const CmdResult r = run_cmd(bin + " --help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("paintcat") != std::string::npos);
}
