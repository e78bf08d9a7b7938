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

// Converts the pair and compares stringsums of every string up to length 4
// with the oracle run on the unconverted merge. Returns the number of
// strings compared with a nonzero expected weight, or -1 if the oracle
// could not finish.
int check_conversion(const GrammarFile& f, const Semiring& sr) {
  TwoLevelGrammar g = testing::merge(f);
  bool complete = false;
  std::map<std::vector<int>, Weight> table;
  try {
    table = testing::oracle_table(g, sr, 4, 0, &complete);
  } catch (const ResourceExceeded&) {
    return -1;
  }
  if (!complete) return -1;
  NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
  CHECK_NOTHROW(classify_nf(c.nf.grammar()));
  int nonzero = 0;
  for (const auto& s : testing::all_strings(2, 4)) {
    auto it = table.find(s);
    Weight expected = it == table.end() ? sr.zero() : it->second;
    nonzero += !sr.is_zero(expected);
    CHECK(sr.approx_eq(stringsum(c.nf, s, sr), expected, 1e-9));
  }
  return nonzero;
}

// The same comparison after a single transformation step, which need not
// produce a normal form: the output is run through the full conversion.
void check_step(const GrammarFile& before, const ControlPair& after, const Semiring& sr) {
  GrammarFile f;
  f.symbols = after.controller.symbols;
  f.controller = after.controller;
  f.controllee = after.controllee;
  f.generated = true;
  TwoLevelGrammar g = testing::merge(before);
  auto table = testing::oracle_table(g, sr, 3);
  NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
  for (const auto& s : testing::all_strings(2, 3)) {
    auto it = table.find(s);
    Weight expected = it == table.end() ? sr.zero() : it->second;
    CHECK(sr.approx_eq(stringsum(c.nf, s, sr), expected, 1e-9));
  }
}

const char* kLongRules = R"(
controller cfg start C
C -> "l1" C @ 0.5
C -> "l2" @ 0.5
controllee ldcfg start S
l1 : S -> 'a' *S 'b' 'a' @ 0.5
l2 : S -> 'b' @ 1.0
)";

}  // namespace

TEST_CASE("conversion keeps stringsums of general CFG pairs") {
  std::mt19937 rng(2718);
  for (const Semiring& sr : {Semiring::counting(), Semiring::real()}) {
    int nonzero = 0, checked = 0;
    for (int t = 0; t < 40; ++t) {
      GrammarFile f = testing::random_general_pair(rng, {}, sr);
      int n = check_conversion(f, sr);
      if (n < 0) continue;
      ++checked;
      nonzero += n;
    }
    CHECK(checked >= 35);
    CHECK(nonzero > 40);
  }
}

TEST_CASE("conversion keeps stringsums with an automaton controller") {
  std::mt19937 rng(3141);
  Semiring sr = Semiring::real();
  int nonzero = 0;
  for (int t = 0; t < 20; ++t) {
    GrammarFile f = testing::with_pda_controller(testing::random_general_pair(rng, {}, sr));
    nonzero += std::max(0, check_conversion(f, sr));
  }
  CHECK(nonzero > 20);
}

TEST_CASE("conversion splits long pushes of automaton controllees") {
  std::mt19937 rng(1618);
  for (Formalism form : {Formalism::cp, Formalism::pp}) {
    Semiring sr = Semiring::real();
    int changed = 0;
    for (int t = 0; t < 20; ++t) {
      testing::NfShape shape;
      shape.formalism = form;
      GrammarFile f = testing::random_nf_pair(rng, shape, sr);
      testing::add_long_pushes(rng, f, sr);
      check_conversion(f, sr);
      changed += !nf_convert_two_level(*f.controller, *f.controllee).unchanged;
    }
    CHECK(changed > 0);
  }
}

TEST_CASE("pairs already in normal form come back unchanged") {
  std::mt19937 rng(11);
  Semiring sr = Semiring::real();
  for (int t = 0; t < 12; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    GrammarFile f = testing::random_nf_pair(rng, shape, sr);
    NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
    CHECK(c.unchanged);
    CHECK(c.nf.grammar().rules.size() == testing::merge(f).rules.size());
  }
}

TEST_CASE("the converted pair survives a write and reload") {
  Semiring sr = Semiring::counting();
  GrammarFile f = load_path(TLW_SOURCE_DIR "/grammars/anbncndn.tlg", sr);
  NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
  CHECK_FALSE(c.unchanged);
  std::string text = emit_file(c.pair, sr);
  GrammarFile back = load_text(text, sr);
  CHECK(back.generated);
  TwoLevelNF nf = classify_nf(control(*back.controller, *back.controllee));
  CHECK(nf.grammar().rules.size() == c.nf.grammar().rules.size());
  std::vector<int> abcd = terminal_ids(nf.grammar(), {"a", "b", "c", "d"});
  CHECK(sr.format(stringsum(nf, abcd, sr)) == "1");
  // Converting again is a no-op.
  CHECK(nf_convert_two_level(*back.controller, *back.controllee).unchanged);
}

TEST_CASE("a scanning transition that pushes gets a pre-terminal") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_text(R"(
controller pda init e S final f
e , S -> f , S @ 0.5 scan "l1"
f , S -> f , @ 0.5 scan "l2"
)",
                            sr);
  PreparedWpda p = prepare_wpda(*f.controller, sr);
  CHECK(p.residue.empty());
  REQUIRE(p.pda.pda.size() == 3);
  int pushes = 0, scans = 0;
  for (const auto& tr : p.pda.pda) {
    CHECK(tr.pop.size() == 1);
    if (tr.scan >= 0) {
      ++scans;
      CHECK(tr.push.empty());
    } else {
      ++pushes;
      CHECK(tr.push.size() == 2);
    }
  }
  CHECK(pushes == 1);
  CHECK(scans == 2);
}

TEST_CASE("long pushes become chains through fresh states") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_text(R"(
controller pda init e S final e
e , S -> e , A B C D @ 0.25
e , A -> e , @ 1.0 scan "l1"
)",
                            sr);
  PreparedWpda p = prepare_wpda(*f.controller, sr);
  // Four symbols take three transitions, and the weight stays on the first.
  CHECK(p.pda.pda.size() == 4);
  int carrying = 0;
  for (const auto& tr : p.pda.pda) {
    CHECK(tr.push.size() <= 2);
    carrying += sr.to_double(tr.weight) == 0.25;
  }
  CHECK(carrying == 1);
  CHECK(p.pda.symbols->size(Ns::controller_state) == 3);
}

TEST_CASE("automaton residue is reported and strict mode rejects it") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_text(R"(
controller pda init e S final e
e , S -> e , A @ 1.0
e , A -> e , @ 1.0 scan "l1"
)",
                            sr);
  PreparedWpda p = prepare_wpda(*f.controller, sr);
  CHECK(p.residue.size() == 1);
  CHECK_THROWS_AS(prepare_wpda(*f.controller, sr, true), NotNormalForm);
}

TEST_CASE("an automaton, its run grammar and the automaton rebuilt from CNF agree") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_text(R"(
controller pda init e S final f
e , S -> e , S T @ 0.5
e , S -> f , @ 0.5 scan "l1"
f , T -> f , @ 1.0 scan "l2"
controllee ldcfg start S
l1 : S -> 'a' @ 1.0
l1 : S -> 'a' *Y @ 1.0
l2 : Y -> 'b' *Y @ 1.0
l2 : Y -> 'b' @ 1.0
)",
                            sr);
  GrammarSpec cfg = wpda_to_wcfg(*f.controller, sr);
  GrammarSpec cnf = cnf_convert_wcfg(cfg, sr);
  CHECK(is_cnf(cnf));
  GrammarSpec back = cnf_to_wpda(cnf, sr);
  CHECK_NOTHROW(prepare_wpda(back, sr, true));
  // The label language is l1 l2^n with weight 0.5^(n+1), so "a b^n" has
  // that weight under each controller.
  for (const GrammarSpec* ctl : {&*f.controller, &cfg, &cnf, &back}) {
    TwoLevelGrammar g = control(*ctl, *f.controllee);
    double w = 0.5;
    std::vector<std::string> s{"a"};
    for (int n = 0; n <= 3; ++n) {
      std::vector<int> ids = terminal_ids(g, s);
      CHECK(sr.to_double(oracle_stringsum(g, sr, ids, 40)) == doctest::Approx(w));
      w *= 0.5;
      s.push_back("b");
    }
  }
}

TEST_CASE("long controllee rules are binarized along the distinguished path") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_text(kLongRules, sr);
  ControlPair p = binarize_controllee(*f.controllee, *f.controller, sr);
  for (const auto& r : p.controllee.ldcfg) CHECK(r.rhs.size() <= 2);
  check_step(f, p, sr);
  GrammarFile bad = load_text(R"(
controller cfg start C
C -> "l1" @ 1.0
controllee ldcfg start S
l1 : S -> 'a' 'b' 'c' @ 1.0
)",
                              sr);
  CHECK_THROWS_AS(binarize_controllee(*bad.controllee, *bad.controller, sr), NotNormalForm);
}

TEST_CASE("single transformation steps keep the language") {
  std::mt19937 rng(777);
  Semiring sr = Semiring::real();
  for (int t = 0; t < 15; ++t) {
    GrammarFile f = testing::random_general_pair(rng, {}, sr);
    CAPTURE(emit_file(f, sr));
    ControlPair nullary = remove_nullary_controllee(*f.controller, *f.controllee, sr);
    for (const auto& r : nullary.controllee.ldcfg)
      if (r.rhs.empty()) CHECK(r.lhs == nullary.controllee.start);
    check_step(f, nullary, sr);

    ControlPair unary = remove_unary_controllee(*f.controller, *f.controllee, sr);
    for (const auto& r : unary.controllee.ldcfg) CHECK_FALSE((r.rhs.size() == 1 && r.rhs[0].is_nt));
    check_step(f, unary, sr);

    ControlPair root_foot = root_foot_transform(*f.controller, *f.controllee, sr);
    check_step(f, root_foot, sr);
  }
}

TEST_CASE("an automaton controllee may push its start symbol") {
  Semiring sr = Semiring::real();
  GrammarFile f = load_path(TLW_SOURCE_DIR "/grammars/two_automata.tlg", sr);
  TwoLevelGrammar g = control(*f.controller, *f.controllee);
  NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
  CHECK_FALSE(c.unchanged);
  auto table = testing::oracle_table(g, sr, 5, 60);
  CHECK(table.size() == 3);
  for (const auto& s : testing::all_strings(3, 5)) {
    auto it = table.find(s);
    Weight expected = it == table.end() ? sr.zero() : it->second;
    CHECK(sr.approx_eq(stringsum(c.nf, s, sr), expected, 1e-9));
  }
}
