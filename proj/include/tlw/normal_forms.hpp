#ifndef TLW_NORMAL_FORMS_HPP
#define TLW_NORMAL_FORMS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tlw/fixed_point.hpp"
#include "tlw/grammar_io.hpp"
#include "tlw/two_level.hpp"

namespace tlw {

// ---------------------------------------------------------------------------
// Plain WCFGs (controllers, or standalone `grammar cfg` blocks)

/** Weight of all derivations X =>* empty string, indexed by nonterminal id.
 *  Throws UnsupportedOperation if the iteration does not settle. */
std::vector<Weight> nullary_weights_wcfg(const GrammarSpec& g, const Semiring& sr,
                                         const SolverConfig& cfg = {});

/** Weight of all unary chains X =>* Y. Only nonzero entries are stored;
 *  the diagonal is always present. Empty rules are ignored. */
std::map<std::pair<int, int>, Weight> unary_chain_weights_wcfg(const GrammarSpec& g,
                                                               const Semiring& sr,
                                                               const SolverConfig& cfg = {});

/** Shape check: S -> empty, X -> a, X -> Y Z, and the start symbol on no
 *  right-hand side. Offending rules are appended to `why` if given. */
bool is_cnf(const GrammarSpec& g, std::vector<std::string>* why = nullptr);

/** Chomsky normal form with the same weighted language. The result has a
 *  fresh start symbol and its own copy of the symbol table. */
GrammarSpec cnf_convert_wcfg(const GrammarSpec& g, const Semiring& sr,
                             const SolverConfig& cfg = {});

/** Splits right-hand sides longer than two into chains of fresh
 *  nonterminals. Terminals stay where they are. */
GrammarSpec binarize_wcfg(const GrammarSpec& g, const Semiring& sr);

// ---------------------------------------------------------------------------
// Controller/controllee pairs with a WLD-CFG controllee

struct ControlPair {
  GrammarSpec controller;
  GrammarSpec controllee;
};

/** Replaces every controllee rule with more than two right-hand-side
 *  symbols by a chain of binary rules through fresh nonterminals that keeps
 *  the distinguished path, and rewrites the controller so that each
 *  occurrence of the old label becomes the chain's label sequence. */
ControlPair binarize_controllee(const GrammarSpec& controllee, const GrammarSpec& controller,
                                const Semiring& sr);

/** Refines every controller nonterminal A into copies A[X, Y] that derive
 *  label sequences leading the controllee from root X down the
 *  distinguished path to foot Y (or to the end of the path, foot `end`).
 *  Each controllee rule is relabeled with its own root and foot. The new
 *  controller start rewrites to S[X, end] for every controllee
 *  nonterminal X. */
ControlPair root_foot_transform(const GrammarSpec& controller, const GrammarSpec& controllee,
                                const Semiring& sr);

/** Removes empty controllee rules. Subtrees with an empty yield are summed
 *  out and their weight is moved to the controller; the only empty rule
 *  left rewrites a fresh controllee start symbol. The controller that comes
 *  back is not binarized. */
ControlPair remove_nullary_controllee(const GrammarSpec& controller,
                                      const GrammarSpec& controllee, const Semiring& sr,
                                      const SolverConfig& cfg = {});

/** Removes controllee rules X -> *Y. Their weight is moved to the
 *  controller, which gains empty and unary rules. */
ControlPair remove_unary_controllee(const GrammarSpec& controller,
                                    const GrammarSpec& controllee, const Semiring& sr,
                                    const SolverConfig& cfg = {});

// ---------------------------------------------------------------------------
// Automata

struct PreparedWpda {
  GrammarSpec pda;
  /** Transitions that are still nullary (no scan, nothing pushed) or unary
   *  (no scan, one symbol pushed), in a readable form. */
  std::vector<std::string> residue;
};

/** Makes every transition pop one symbol, moves scanned symbols into
 *  dedicated scanning transitions that push nothing, and splits pushes of
 *  more than two symbols into chains through fresh states. With `strict`,
 *  a nonempty residue raises NotNormalForm. */
PreparedWpda prepare_wpda(const GrammarSpec& p, const Semiring& sr, bool strict = false);

/** The context-free grammar of an automaton's accepting runs, over
 *  nonterminals [q, X, r]. Runs must end with a scanning transition, which
 *  is what a controller needs. */
GrammarSpec wpda_to_wcfg(const GrammarSpec& p, const Semiring& sr);

/** A CNF grammar as a one-state automaton: A -> B C pushes B C, A -> a
 *  scans a. The empty rule, if present, is dropped. */
GrammarSpec cnf_to_wpda(const GrammarSpec& g, const Semiring& sr);

/** Checks that a WLD-PDA controllee is in normal form after splitting long
 *  non-scanning pushes (the controller's labels are rewritten to match).
 *  Throws NotNormalForm listing every other offending transition. */
ControlPair normalize_ldpda_controllee(const GrammarSpec& controller,
                                       const GrammarSpec& controllee, const Semiring& sr);

// ---------------------------------------------------------------------------
// Whole pipeline

struct NfConversion {
  TwoLevelNF nf;
  /** The normal-form pair as grammar blocks, ready to be written out. */
  GrammarFile pair;
  /** True when the input pair already merged into normal form. */
  bool unchanged = false;
};

/** Converts any supported pair into an equivalent one whose merge is in
 *  normal form. */
NfConversion nf_convert_two_level(const GrammarSpec& controller, const GrammarSpec& controllee,
                                  const SolverConfig& cfg = {});

}  // namespace tlw

#endif
