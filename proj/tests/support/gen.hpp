#ifndef TLW_TESTS_GEN_HPP
#define TLW_TESTS_GEN_HPP

#include <random>
#include <string>
#include <vector>

#include "tlw/grammar_io.hpp"
#include "tlw/two_level.hpp"

namespace tlw::testing {

/** Weight drawn from {0.1, 0.2, ..., 1.0} for real/Viterbi, and 1 for
 *  boolean/counting (the only nonzero literal those files accept). */
Weight random_weight(std::mt19937& rng, const Semiring& sr);

struct NfShape {
  Formalism formalism = Formalism::cc;
  int max_controllee_symbols = 4;
  int max_controller_symbols = 4;
  int max_states = 2;
  int terminals = 2;
};

/** A random controller/controllee pair whose merge is in normal form. */
GrammarFile random_nf_pair(std::mt19937& rng, const NfShape& shape, const Semiring& sr);

struct GeneralShape {
  int max_controllee_symbols = 3;
  int max_controller_rhs = 4;
  int terminals = 2;
};

/** A random WLD-CFG controllee (rules with a distinguished child, single
 *  terminals, empty rules, undistinguished sequences) and a WCFG controller
 *  that mostly follows its paths, with empty, unary and long rules. No
 *  string has infinitely many derivations. */
GrammarFile random_general_pair(std::mt19937& rng, const GeneralShape& shape,
                                const Semiring& sr);

/** The same pair with the controller run as a one-state top-down automaton
 *  that scans each label from a dedicated stack symbol. */
GrammarFile with_pda_controller(const GrammarFile& f);

/** Adds up to two automaton-controllee transitions that push three
 *  symbols without scanning, under fresh labels that the controller may
 *  use wherever it already emits a label. The pair must have an automaton
 *  controllee. */
void add_long_pushes(std::mt19937& rng, GrammarFile& f, const Semiring& sr);

/** Every string over the grammar's terminals up to length `max_len`. */
std::vector<std::vector<int>> all_strings(int terminals, int max_len);

/** Merges the two blocks of a generated file. */
TwoLevelGrammar merge(const GrammarFile& f);

}  // namespace tlw::testing

#endif
