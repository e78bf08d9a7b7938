#ifndef TLW_TWO_LEVEL_HPP
#define TLW_TWO_LEVEL_HPP

#include <string>
#include <vector>

#include "tlw/grammar.hpp"
#include "tlw/semiring.hpp"

namespace tlw {

/** Which pair of ingredient formalisms produced a two-level grammar:
 *  controller first, controllee second. */
enum class Formalism : std::uint8_t { cc, pc, cp, pp };

std::string to_string(Formalism f);
bool controller_is_pda(Formalism f);
bool controllee_is_pda(Formalism f);
Formalism formalism_of(Variant controller, Variant controllee);

enum class RuleKind : std::uint8_t {
  eps,
  term,
  pop_left,
  pop_right,
  push,
  // Shapes that occur only before normalization.
  nullary,
  unary_controllee,
  unary_controller,
  general,
};

std::string to_string(RuleKind k);
bool is_nf_kind(RuleKind k);

/** One right-hand-side unit: a controllee terminal or a controllee
 *  nonterminal (stack symbol, for automata controllees). */
struct Unit {
  bool terminal = false;
  int sym = 0;
  friend bool operator==(const Unit& a, const Unit& b) {
    return a.terminal == b.terminal && a.sym == b.sym;
  }
};

/** A merged rule
 *
 *     p, X[e, A ..]  ->  q, scan, u_1 ... u_k      (weight w)
 *
 * read as: controllee nonterminal X in controllee state p, whose controller
 * stack has A on top and whose controller sits in state e, is replaced by
 * the units u_1..u_k after the controllee moves to state q (optionally
 * emitting `scan`). If `dist` >= 0, unit u_dist inherits the rest of the
 * controller stack with `push` on top and the controller moves to `ctl_to`;
 * every other nonterminal unit starts afresh with the controller's initial
 * state and start symbol. If `dist` < 0 the rule applies only when A is the
 * whole stack, `push` is empty and `ctl_to` is the controller's final state.
 *
 * CFG sides use the single state 0. A stack rewrite X[A..] -> X[B C..] is
 * the rule with rhs [X], dist 0, q = p and push [B, C]. */
struct TwoLevelRule {
  RuleKind kind = RuleKind::general;
  int lhs = 0;
  int pop = 0;
  int from_state = 0;
  int to_state = 0;
  int ctl_from = 0;
  int ctl_to = 0;
  std::vector<int> push;
  std::vector<Unit> rhs;
  int dist = -1;
  int scan = -1;
  Weight weight;
  /** Index of the source controller rule, or -1. */
  int controller_src = -1;
  /** Index of the source controllee rule, or -1 for stack rewrites. */
  int controllee_src = -1;
};

struct TwoLevelGrammar {
  Formalism formalism = Formalism::cc;
  SymbolTablePtr symbols;
  /** Controllee start symbol S and controller start symbol. */
  int start = 0;
  int ctl_start = 0;
  int init_state = 0;
  int final_state = 0;
  int ctl_init = 0;
  int ctl_final = 0;
  int n_states = 1;
  int n_ctl_states = 1;
  std::vector<TwoLevelRule> rules;
  std::vector<std::string> warnings;

  int n_nonterminals() const { return symbols->size(Ns::controllee_nt); }
  int n_ctl_symbols() const { return symbols->size(Ns::controller_nt); }
  int n_terminals() const { return symbols->size(Ns::terminal); }
};

/** A two-level grammar whose every rule has one of the five normal-form
 *  kinds. Only classify_nf creates these. */
class TwoLevelNF {
 public:
  const TwoLevelGrammar& grammar() const { return g_; }
  const std::vector<TwoLevelRule>& rules() const { return g_.rules; }
  Formalism formalism() const { return g_.formalism; }

 private:
  explicit TwoLevelNF(TwoLevelGrammar g) : g_(std::move(g)) {}
  friend TwoLevelNF classify_nf(TwoLevelGrammar g);
  TwoLevelGrammar g_;
};

TwoLevelGrammar control_cfg_cfg(const GrammarSpec& controller, const GrammarSpec& controllee);
TwoLevelGrammar control_pda_cfg(const GrammarSpec& controller, const GrammarSpec& controllee);
TwoLevelGrammar control_cfg_pda(const GrammarSpec& controller, const GrammarSpec& controllee);
TwoLevelGrammar control_pda_pda(const GrammarSpec& controller, const GrammarSpec& controllee);
/** Dispatches on the variants of the two inputs. */
TwoLevelGrammar control(const GrammarSpec& controller, const GrammarSpec& controllee);

/** The semiring both blocks' weights come from (real if there are no
 *  rules). Throws TypeError if they disagree. */
Semiring semiring_of(const GrammarSpec& a, const GrammarSpec& b);

/** Shape of a single rule; normal-form kinds take precedence. */
RuleKind rule_shape(const TwoLevelGrammar& g, const TwoLevelRule& r);
/** Sets every rule's kind from its shape. */
void assign_kinds(TwoLevelGrammar& g);
/** Throws NotNormalForm listing every rule outside the five kinds, and
 *  every violation of the start-symbol conditions. */
TwoLevelNF classify_nf(TwoLevelGrammar g);

std::string describe_rule(const TwoLevelGrammar& g, const TwoLevelRule& r);

}  // namespace tlw

#endif
