// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "checks.hpp"
#include "gen.hpp"
#include "tlw/allsum.hpp"
#include "tlw/errors.hpp"
#include "tlw/grammar_io.hpp"
#include "tlw/normal_forms.hpp"
#include "tlw/oracle.hpp"
#include "tlw/stringsum.hpp"

using namespace tlw;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string grammar_path(const std::string& name) { return TLW_SOURCE_DIR "/grammars/" + name; }

std::vector<int> spell(const TwoLevelGrammar& g, const std::string& s) {
  std::vector<std::string> names;
  for (char c : s) names.emplace_back(1, c);
  return terminal_ids(g, names);
}

Outcome example_grammar() {
  const std::vector<std::string> members{"", "abcd", "aabbccdd", "aaabbbcccddd"};
  const std::vector<std::string> non_members{
      "abc",      "aabbccd",  "abdc",     "a",         "d",        "abcdabcd", "aabcd",
      "abbcd",    "abccd",    "abcdd",    "aabbcdd",   "bacd",     "dcba",     "acbd",
      "aabbccdc", "abcdd",    "aaabbbcccdd", "aabbbccdd", "ab",      "cd"};
  Outcome o;
  auto t0 = Clock::now();
  int checked = 0;
  for (const Semiring& sr : {Semiring::counting(), Semiring::boolean()}) {
    GrammarFile f = load_path(grammar_path("anbncndn.tlg"), sr);
    NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
    const TwoLevelGrammar& g = c.nf.grammar();
    for (const auto& s : members) {
      Weight w = stringsum(c.nf, spell(g, s), sr);
      ++checked;
      if (w != sr.one()) {
        o.pass = false;
        o.detail += " member '" + s + "' gave " + sr.format(w) + " in " + std::string(sr.name()) + ";";
      }
    }
    for (const auto& s : non_members) {
      Weight w = stringsum(c.nf, spell(g, s), sr);
      ++checked;
      if (!sr.is_zero(w)) {
        o.pass = false;
        o.detail += " non-member '" + s + "' gave " + sr.format(w) + " in " + std::string(sr.name()) + ";";
      }
    }
  }
  double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) o.pass = false;
  std::ostringstream d;
  d << checked << " stringsums over counting and boolean, " << elapsed << " s";
  o.detail = d.str() + (o.detail.empty() ? "" : ";" + o.detail);
  return o;
}

Outcome stringsum_vs_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  long compared = 0, nonzero = 0, mismatches = 0;
  const auto strings = testing::all_strings(2, 5);
  for (Formalism form : {Formalism::cc, Formalism::pc, Formalism::cp, Formalism::pp}) {
    for (const Semiring& sr : {Semiring::boolean(), Semiring::counting(), Semiring::real()}) {
      std::mt19937 rng(9000 + 10 * static_cast<int>(form) + static_cast<int>(sr.kind()));
      for (int t = 0; t < 100; ++t) {
        testing::NfShape shape;
        shape.formalism = form;
        GrammarFile file = testing::random_nf_pair(rng, shape, sr);
        TwoLevelGrammar g = testing::merge(file);
        TwoLevelNF nf = classify_nf(g);
        for (const auto& s : strings) {
          Weight expected = oracle_stringsum(g, sr, s);
          Weight got = stringsum(nf, s, sr);
          bool same = sr.kind() == SemiringKind::real ? std::fabs(sr.to_double(got) - sr.to_double(expected)) <= 1e-9
                                                      : got == expected;
          ++compared;
          nonzero += !sr.is_zero(expected);
          if (!same && ++mismatches <= 3)
            o.detail += " mismatch in " + to_string(form) + "/" + std::string(sr.name()) + ": " +
                        sr.format(got) + " vs " + sr.format(expected) + ";";
        }
      }
    }
  }
  double elapsed = seconds_since(t0);
  o.pass = mismatches == 0 && elapsed < 300.0;
  std::ostringstream d;
  d << "1200 grammars (100 per formalism and semiring), " << compared << " strings, " << nonzero
    << " with nonzero weight, " << mismatches << " mismatches, " << elapsed << " s";
  o.detail = d.str() + o.detail;
  return o;
}

Outcome item_semantics() {
  Outcome o;
  Semiring sr = Semiring::counting();
  std::mt19937 rng(31337);
  std::size_t items = 0;
  int mismatches = 0;
  for (int t = 0; t < 10; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    shape.max_controllee_symbols = 3;
    shape.max_controller_symbols = 3;
    TwoLevelNF nf = classify_nf(testing::merge(testing::random_nf_pair(rng, shape, sr)));
    for (const auto& s : testing::all_strings(2, 4)) {
      items += fill_chart(nf, s, sr).entries.size();
      auto diff = testing::chart_vs_pop_computations(nf, s, sr);
      mismatches += static_cast<int>(diff.size());
      if (!diff.empty() && o.detail.empty()) o.detail = "; first: " + diff.front();
    }
  }
  o.pass = mismatches == 0 && items > 0;
  o.detail = "10 micro-grammars, strings up to length 4, " + std::to_string(items) +
             " chart items, " + std::to_string(mismatches) + " mismatches" + o.detail;
  return o;
}

Outcome allsum_criterion() {
  Outcome o;
  std::ostringstream d;
  {
    Semiring sr = Semiring::real();
    GrammarFile f = load_path(grammar_path("quadratic.tlg"), sr);
    AllsumOptions opt;
    opt.solver.tol = 1e-12;
    opt.solver.max_sweeps = 10000;
    AllsumResult r = allsum(control(*f.controller, *f.controllee), sr, opt);
    double err = std::fabs(sr.to_double(r.value) - 2.0 / 3.0);
    bool ok = r.status == SolveStatus::converged && err <= 1e-9 && r.sweeps <= 10000;
    o.pass = o.pass && ok;
    d << "quadratic " << sr.format(r.value) << " (error " << err << ", " << r.sweeps << " sweeps)";
  }
  {
    Semiring sr = Semiring::boolean();
    GrammarFile f = load_path(grammar_path("anbncndn.tlg"), sr);
    AllsumResult r = allsum(control(*f.controller, *f.controllee), sr);
    bool ok = r.status == SolveStatus::converged && r.value == sr.one() && r.sweeps <= r.items + 1;
    o.pass = o.pass && ok;
    d << "; example boolean " << sr.format(r.value) << " in " << r.sweeps << " sweeps over "
      << r.items << " items";
  }
  o.detail = d.str();
  return o;
}

Outcome normal_form_conversion() {
  Outcome o;
  Semiring sr = Semiring::real();
  std::mt19937 rng(5050);
  int checked = 0, attempts = 0, with_empty = 0, with_unary = 0, mismatches = 0, not_nf = 0;
  long nonzero = 0;
  while (checked < 60 && attempts < 300) {
    ++attempts;
    GrammarFile f = testing::random_general_pair(rng, {}, sr);
    bool complete = false;
    std::map<std::vector<int>, Weight> table;
    try {
      table = testing::oracle_table(testing::merge(f), sr, 4, 0, &complete);
    } catch (const ResourceExceeded&) {
      continue;
    }
    if (!complete) continue;
    ++checked;
    bool empty = false, unary = false;
    for (const auto& r : f.controller->cfg) {
      empty = empty || r.rhs.empty();
      unary = unary || (r.rhs.size() == 1 && r.rhs[0].is_nt);
    }
    with_empty += empty;
    with_unary += unary;
    NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
    try {
      GrammarFile back = load_text(emit_file(c.pair, sr), sr);
      classify_nf(control(*back.controller, *back.controllee));
    } catch (const Error& e) {
      if (++not_nf == 1) o.detail += std::string("; first rejected output: ") + e.what();
    }
    for (const auto& s : testing::all_strings(2, 4)) {
      auto it = table.find(s);
      Weight expected = it == table.end() ? sr.zero() : it->second;
      nonzero += !sr.is_zero(expected);
      if (std::fabs(sr.to_double(stringsum(c.nf, s, sr)) - sr.to_double(expected)) > 1e-9)
        ++mismatches;
    }
  }
  o.pass = checked >= 50 && mismatches == 0 && not_nf == 0;
  std::ostringstream d;
  d << checked << " pairs (" << attempts - checked << " skipped: oracle budget), " << with_empty
    << " with empty and " << with_unary << " with unary controller rules, " << nonzero
    << " nonzero strings, " << mismatches << " mismatches, " << not_nf
    << " outputs outside the normal form";
  o.detail = d.str() + o.detail;
  return o;
}

Outcome fixed_point_properties() {
  Outcome o;
  Semiring sr = Semiring::real();
  int grammars = 0, violations = 0, disagreements = 0;
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(TLW_SOURCE_DIR "/grammars"))
    if (e.path().extension() == ".tlg") names.push_back(e.path().string());
  std::sort(names.begin(), names.end());
  for (const auto& path : names) {
    GrammarFile f = load_path(path, sr);
    TwoLevelGrammar g = control(*f.controller, *f.controllee);
    AllsumOptions jacobi, gs;
    jacobi.solver.tol = gs.solver.tol = 1e-13;
    gs.solver.gauss_seidel = true;
    AllsumResult a = allsum(g, sr, jacobi);
    AllsumResult b = allsum(g, sr, gs);
    ++grammars;
    violations += a.monotonicity_violations + b.monotonicity_violations;
    if (std::fabs(sr.to_double(a.value) - sr.to_double(b.value)) > 1e-9) {
      ++disagreements;
      o.detail += "; " + std::filesystem::path(path).filename().string() + ": " +
                  sr.format(a.value) + " vs " + sr.format(b.value);
    }
  }
  o.pass = grammars > 0 && violations == 0 && disagreements == 0;
  o.detail = std::to_string(grammars) + " corpus grammars, " + std::to_string(violations) +
             " monotonicity violations, " + std::to_string(disagreements) +
             " Jacobi/Gauss-Seidel disagreements" + o.detail;
  return o;
}

Outcome semiring_axioms() {
  Outcome o;
  int total = 0;
  std::string per;
  for (const Semiring& sr :
       {Semiring::boolean(), Semiring::counting(), Semiring::real(), Semiring::viterbi()}) {
    int v = testing::axiom_violations(sr, 10000, 424242u);
    total += v;
    per += (per.empty() ? "" : ", ") + std::string(sr.name()) + " " + std::to_string(v);
  }
  o.pass = total == 0;
  o.detail = "10000 triples per semiring; violations: " + per;
  return o;
}

Outcome shape_bound() {
  Outcome o;
  std::mt19937 rng(8888);
  long items = 0, charts = 0;
  int misshapen = 0, over = 0;
  auto check = [&](const TwoLevelNF& nf, const std::vector<int>& s, const Semiring& sr) {
    Chart c = fill_chart(nf, s, sr);
    ++charts;
    items += static_cast<long>(c.entries.size());
    misshapen += testing::misshapen_items(c);
    over += static_cast<double>(c.gapped) > gapped_item_bound(nf.grammar(), c.n);
  };
  Semiring sr = Semiring::real();
  for (int t = 0; t < 40; ++t) {
    testing::NfShape shape;
    shape.formalism = static_cast<Formalism>(t % 4);
    TwoLevelNF nf = classify_nf(testing::merge(testing::random_nf_pair(rng, shape, sr)));
    for (const auto& s : testing::all_strings(2, 5)) check(nf, s, sr);
  }
  Semiring counting = Semiring::counting();
  GrammarFile f = load_path(grammar_path("anbncndn.tlg"), counting);
  NfConversion c = nf_convert_two_level(*f.controller, *f.controllee);
  for (const char* s : {"abcd", "aabbccdd", "aaabbbcccddd", "abcdabcd"})
    check(c.nf, spell(c.nf.grammar(), s), counting);
  o.pass = misshapen == 0 && over == 0;
  o.detail = std::to_string(charts) + " charts, " + std::to_string(items) + " items, " +
             std::to_string(misshapen) + " out of order, " + std::to_string(over) +
             " charts over the gapped bound";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"example grammar", example_grammar},
      {"stringsum vs oracle", stringsum_vs_oracle},
      {"item semantics", item_semantics},
      {"allsum", allsum_criterion},
      {"normal-form conversion", normal_form_conversion},
      {"fixed-point properties", fixed_point_properties},
      {"semiring axioms", semiring_axioms},
      {"shape bound", shape_bound},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
