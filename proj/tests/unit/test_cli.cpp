#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run tlw_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = tlw::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string grammar(const std::string& name) { return TLW_SOURCE_DIR "/grammars/" + name; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "tlw_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("stringsum of the example grammar") {
  Run r = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", "aabbccdd", "--semiring",
                   "counting"});
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
  r = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", "aabbccd", "--semiring",
               "counting"});
  CHECK(r.out == "0\n");
  r = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", "a b c d", "--semiring",
               "boolean"});
  CHECK(r.out == "true\n");
}

TEST_CASE("allsum of the quadratic grammar") {
  Run r = tlw_run({"allsum", grammar("quadratic.tlg"), "--semiring", "real", "--tol", "1e-9"});
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(0.666666667).epsilon(1e-8));
  r = tlw_run({"allsum", grammar("quadratic.tlg"), "--json", "--gauss-seidel"});
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "converged");
  CHECK(j["value"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("JSON output keeps counts exact") {
  Run r = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", "abcd", "--semiring",
                   "counting", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["weight"].is_number_integer());
  CHECK(j["weight"] == 1);
  CHECK(j["text"] == "1");
}

TEST_CASE("domain errors exit with 1") {
  Run r = tlw_run({"allsum", grammar("anbncndn.tlg"), "--semiring", "counting", "--max-sweeps",
                   "50"});
  CHECK(r.code == 1);
  CHECK(r.err.find("converge") != std::string::npos);
  r = tlw_run({"allsum", grammar("anbncndn.tlg"), "--semiring", "counting", "--max-sweeps", "50",
               "--allow-diverged"});
  CHECK(r.code == 0);
  r = tlw_run({"best", grammar("quadratic.tlg"), "--input", "aa", "--semiring", "real"});
  CHECK(r.code == 1);
  ::setenv("TLW_NODE_CAP", "10", 1);
  r = tlw_run({"enumerate", grammar("anbncndn.tlg"), "--max-len", "8"});
  ::unsetenv("TLW_NODE_CAP");
  CHECK(r.code == 1);
}

TEST_CASE("usage and input errors exit with 2") {
  fs::path bad = scratch("bad.tlg");
  write(bad, "controller cfg start S\nS -> -> @ 1.0\n");
  Run r = tlw_run({"validate", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("2:6") != std::string::npos);
  CHECK(tlw_run({"validate", scratch("missing.tlg").string()}).code == 2);
  CHECK(tlw_run({"frobnicate"}).code == 2);
  CHECK(tlw_run({"stringsum", grammar("quadratic.tlg")}).code == 2);
  CHECK(tlw_run({"stringsum", grammar("quadratic.tlg"), "--input", "q"}).code == 2);
  CHECK(tlw_run({"allsum", grammar("quadratic.tlg"), "--semiring", "counting"}).code == 2);
  CHECK(tlw_run({"allsum", grammar("quadratic.tlg"), "--semiring", "tropical"}).code == 2);
  CHECK(tlw_run({"--help"}).code == 0);
}

TEST_CASE("normalize writes a pair that converts to itself") {
  fs::path once = scratch("once.tlg");
  fs::path twice = scratch("twice.tlg");
  REQUIRE(tlw_run({"normalize", grammar("anbncndn.tlg"), "-o", once.string()}).code == 0);
  REQUIRE(tlw_run({"normalize", once.string(), "-o", twice.string()}).code == 0);
  CHECK(read(once) == read(twice));
  Run v = tlw_run({"validate", once.string()});
  CHECK(v.code == 0);
  CHECK(v.out.find(", normal form") != std::string::npos);
  for (const char* s : {"", "abcd", "aabbccdd", "abdc"}) {
    Run a = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", s, "--semiring", "counting"});
    Run b = tlw_run({"stringsum", once.string(), "--input", s, "--semiring", "counting"});
    CHECK(a.out == b.out);
  }
}

TEST_CASE("enumerate, best and the chart dump") {
  Run e = tlw_run({"enumerate", grammar("anbncndn.tlg"), "--max-len", "4", "--semiring",
                   "counting", "--json"});
  REQUIRE(e.code == 0);
  auto j = nlohmann::json::parse(e.out);
  CHECK(j["strings"].size() == 2);

  Run b = tlw_run({"best", grammar("quadratic.tlg"), "--input", "aaa", "--json"});
  REQUIRE(b.code == 0);
  auto bj = nlohmann::json::parse(b.out);
  CHECK(bj["weight"].get<double>() == doctest::Approx(0.6 * 0.6 * 0.4 * 0.4 * 0.4));

  fs::path dump = scratch("chart.jsonl");
  Run s = tlw_run({"stringsum", grammar("anbncndn.tlg"), "--input", "abcd", "--chart-dump",
                   dump.string()});
  CHECK(s.code == 0);
  std::istringstream lines(read(dump));
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) CHECK_NOTHROW(nlohmann::json::parse(line));
  CHECK(n > 0);
}
