#include <cstdlib>

#include "doctest.h"
#include "tlw/errors.hpp"
#include "tlw/grammar_io.hpp"
#include "tlw/oracle.hpp"

using namespace tlw;

namespace {

TwoLevelGrammar example(const Semiring& sr) {
  GrammarFile f = load_path(TLW_SOURCE_DIR "/grammars/anbncndn.tlg", sr);
  return control(*f.controller, *f.controllee);
}

std::string spell(const TwoLevelGrammar& g, const std::vector<int>& s) {
  std::string out;
  for (int t : s) out += g.symbols->name(Ns::terminal, t);
  return out;
}

}  // namespace

TEST_CASE("the example language up to length eight") {
  Semiring sr = Semiring::counting();
  TwoLevelGrammar g = example(sr);
  OracleOptions o;
  o.max_len = 8;
  o.max_steps = 80;
  EnumerateResult r = enumerate(g, sr, o);
  REQUIRE(r.strings.size() == 3);
  CHECK(spell(g, r.strings[0].yield).empty());
  CHECK(spell(g, r.strings[1].yield) == "abcd");
  CHECK(spell(g, r.strings[2].yield) == "aabbccdd");
  for (const auto& sw : r.strings) CHECK(sr.format(sw.weight) == "1");
  CHECK_FALSE(r.normal_form);
}

TEST_CASE("recorded derivations replay to their yields") {
  Semiring sr = Semiring::real();
  TwoLevelGrammar g = example(sr);
  OracleOptions o;
  o.max_len = 4;
  o.max_steps = 40;
  o.record = true;
  EnumerateResult r = enumerate(g, sr, o);
  REQUIRE(r.derivations.size() == 2);
  for (const auto& d : r.derivations) {
    auto again = replay(g, sr, d.rules);
    REQUIRE(again.has_value());
    CHECK(again->yield == d.yield);
    CHECK(sr.approx_eq(again->weight, d.weight));
  }
  // Dropping the last step leaves the derivation incomplete.
  auto cut = r.derivations.back().rules;
  cut.pop_back();
  CHECK_FALSE(replay(g, sr, cut).has_value());
}

TEST_CASE("oracle stringsums of single strings") {
  Semiring sr = Semiring::counting();
  TwoLevelGrammar g = example(sr);
  auto ids = [&](const std::string& s) {
    std::vector<int> out;
    for (char c : s) out.push_back(g.symbols->find(Ns::terminal, std::string(1, c)));
    return out;
  };
  CHECK(sr.format(oracle_stringsum(g, sr, ids("abcd"), 40)) == "1");
  CHECK(sr.format(oracle_stringsum(g, sr, ids("abdc"), 40)) == "0");
  CHECK(sr.format(oracle_stringsum(g, sr, {}, 40)) == "1");
}

TEST_CASE("the truncated allsum grows with the budget") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_path(TLW_SOURCE_DIR "/grammars/quadratic.tlg", sr);
  TwoLevelGrammar g = control(*f.controller, *f.controllee);
  double prev = 0.0;
  for (int steps : {4, 8, 12, 16}) {
    double v = sr.to_double(oracle_allsum_truncated(g, sr, steps, 8));
    CHECK(v >= prev);
    CHECK(v <= 2.0 / 3.0 + 1e-12);
    prev = v;
  }
  CHECK(prev > 0.4);
}

TEST_CASE("the node cap stops runaway searches") {
  Semiring sr = Semiring::real();
  TwoLevelGrammar g = example(sr);
  OracleOptions o;
  o.max_len = 12;
  o.max_steps = 200;
  o.node_cap = 50;
  CHECK_THROWS_AS(enumerate(g, sr, o), ResourceExceeded);
  ::setenv("TLW_NODE_CAP", "50", 1);
  o.node_cap = 0;
  CHECK_THROWS_AS(enumerate(g, sr, o), ResourceExceeded);
  ::unsetenv("TLW_NODE_CAP");
  CHECK_NOTHROW(enumerate(g, sr, o));
}

TEST_CASE("normal-form derivations take 3n - 2 steps") {
  CHECK(step_bound(1) >= 1);
  CHECK(step_bound(4) >= 10);
}
