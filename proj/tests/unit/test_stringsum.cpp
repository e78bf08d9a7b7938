#include <algorithm>
#include <random>

#include "checks.hpp"
#include "doctest.h"
#include "gen.hpp"
#include "tlw/errors.hpp"
#include "tlw/grammar_io.hpp"
#include "tlw/normal_forms.hpp"
#include "tlw/oracle.hpp"
#include "tlw/stringsum.hpp"

using namespace tlw;

namespace {

std::vector<int> chars(const TwoLevelGrammar& g, const std::string& s) {
  std::vector<std::string> names;
  for (char c : s) names.emplace_back(1, c);
  return terminal_ids(g, names);
}

NfConversion example_nf(const Semiring& sr) {
  GrammarFile f = load_path(TLW_SOURCE_DIR "/grammars/anbncndn.tlg", sr);
  return nf_convert_two_level(*f.controller, *f.controllee);
}

}  // namespace

TEST_CASE("the example grammar counts each member once") {
  Semiring sr = Semiring::counting();
  NfConversion c = example_nf(sr);
  const TwoLevelGrammar& g = c.nf.grammar();
  for (const char* s : {"", "abcd", "aabbccdd", "aaabbbcccddd"})
    CHECK(sr.format(stringsum(c.nf, chars(g, s), sr)) == "1");
  for (const char* s : {"abc", "abdc", "aabbccd", "abcdabcd", "ba", "dcba"})
    CHECK(sr.is_zero(stringsum(c.nf, chars(g, s), sr)));
}

TEST_CASE("stringsum agrees with the oracle on random normal-form pairs") {
  for (Formalism form : {Formalism::cc, Formalism::pc, Formalism::cp, Formalism::pp}) {
    for (const Semiring& sr : {Semiring::counting(), Semiring::real()}) {
      CAPTURE(to_string(form));
      CAPTURE(sr.name());
      std::mt19937 rng(1000 + static_cast<int>(form));
      int mismatches = 0, nonzero = 0;
      for (int t = 0; t < 15; ++t) {
        testing::NfShape shape;
        shape.formalism = form;
        GrammarFile file = testing::random_nf_pair(rng, shape, sr);
        TwoLevelGrammar g = testing::merge(file);
        TwoLevelNF nf = classify_nf(g);
        auto table = testing::oracle_table(g, sr, 4);
        for (const auto& s : testing::all_strings(2, 4)) {
          auto it = table.find(s);
          Weight expected = it == table.end() ? sr.zero() : it->second;
          nonzero += !sr.is_zero(expected);
          mismatches += !sr.approx_eq(stringsum(nf, s, sr), expected, 1e-9);
        }
      }
      CHECK(mismatches == 0);
      CHECK(nonzero > 0);
    }
  }
}

TEST_CASE("chart items equal directly enumerated pop computations") {
  Semiring sr = Semiring::counting();
  std::mt19937 rng(31);
  for (int t = 0; t < 10; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    shape.max_controllee_symbols = 3;
    shape.max_controller_symbols = 3;
    TwoLevelNF nf = classify_nf(testing::merge(testing::random_nf_pair(rng, shape, sr)));
    for (const auto& s : testing::all_strings(2, 3)) {
      auto diff = testing::chart_vs_pop_computations(nf, s, sr);
      CHECK(diff.empty());
      if (!diff.empty()) MESSAGE(diff.front());
    }
  }
}

TEST_CASE("frozen chart of the example grammar") {
  Semiring sr = Semiring::counting();
  NfConversion c = example_nf(sr);
  const TwoLevelGrammar& g = c.nf.grammar();
  Chart chart = fill_chart(c.nf, chars(g, "abcd"), sr);
  CHECK(chart.n == 4);
  CHECK(sr.format(chart.goal) == "1");
  CHECK(testing::misshapen_items(chart) == 0);
  CHECK(static_cast<double>(chart.gapped) <= gapped_item_bound(g, 4));
  CHECK(chart.ungapped + chart.gapped == chart.entries.size());
}

TEST_CASE("the chart respects the shape bound on random grammars") {
  std::mt19937 rng(77);
  Semiring sr = Semiring::real();
  for (int t = 0; t < 20; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    GrammarFile file = testing::random_nf_pair(rng, shape, sr);
    TwoLevelNF nf = classify_nf(testing::merge(file));
    for (const auto& s : testing::all_strings(2, 3)) {
      Chart c = fill_chart(nf, s, sr);
      CHECK(testing::misshapen_items(c) == 0);
      CHECK(static_cast<double>(c.gapped) <= gapped_item_bound(nf.grammar(), c.n));
    }
  }
}

TEST_CASE("best derivations replay to their string and weight") {
  std::mt19937 rng(5);
  Semiring sr = Semiring::viterbi();
  int found = 0;
  for (int t = 0; t < 30; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    GrammarFile file = testing::random_nf_pair(rng, shape, sr);
    TwoLevelGrammar g = testing::merge(file);
    TwoLevelNF nf = classify_nf(g);
    for (const auto& s : testing::all_strings(2, 3)) {
      auto best = best_derivation(nf, s, sr);
      Weight total = stringsum(nf, s, sr);
      REQUIRE(best.has_value() == !sr.is_zero(total));
      if (!best) continue;
      ++found;
      // In the Viterbi semiring the stringsum is the best weight.
      CHECK(sr.approx_eq(best->weight, total, 1e-12));
      auto replayed = replay(g, sr, best->rules);
      REQUIRE(replayed.has_value());
      CHECK(replayed->yield == s);
      CHECK(sr.approx_eq(replayed->weight, best->weight, 1e-12));
      if (!s.empty()) CHECK(best->rules.size() == 3 * s.size() - 2);
    }
  }
  CHECK(found > 20);
}

TEST_CASE("best derivation needs an idempotent semiring") {
  Semiring sr = Semiring::real();
  NfConversion c = example_nf(sr);
  CHECK_THROWS_AS(best_derivation(c.nf, {}, sr), UnsupportedOperation);
}

TEST_CASE("unknown terminals are input errors") {
  NfConversion c = example_nf(Semiring::real());
  CHECK_THROWS_AS(terminal_ids(c.nf.grammar(), {"q"}), InputError);
}

TEST_CASE("the chart dump has one JSON object per item") {
  Semiring sr = Semiring::counting();
  NfConversion c = example_nf(sr);
  Chart chart = fill_chart(c.nf, chars(c.nf.grammar(), "abcd"), sr);
  std::string dump = chart_to_jsonl(c.nf.grammar(), chart, sr);
  CHECK(static_cast<std::size_t>(std::count(dump.begin(), dump.end(), '\n')) ==
        chart.entries.size());
  CHECK(dump.find("\"gapped\":true") != std::string::npos);
}
