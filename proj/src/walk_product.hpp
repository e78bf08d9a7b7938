#ifndef TLW_SRC_WALK_PRODUCT_HPP
#define TLW_SRC_WALK_PRODUCT_HPP

#include <map>
#include <string>
#include <vector>

#include "tlw/fixed_point.hpp"
#include "tlw/grammar.hpp"

namespace tlw::nf_detail {

// A controller derives, for every distinguished path of the controllee, the
// sequence of labels used along it. A walk is a finite automaton over those
// labels whose states track what the path has seen so far; the product
// refines every controller nonterminal A into copies A{s|t} that derive
// exactly the label sequences leading the walk from s to t.
//
// States marked `summed` are never turned into nonterminals. Everything a
// copy derives once the walk has entered such a state is replaced by its
// total weight, computed by fixed-point iteration.

/** Marker id inside WalkStep::emit for the product's own start symbol. */
inline constexpr int kProductStart = -1;

struct WalkStep {
  int from = 0;
  int to = 0;
  /** Controller symbols that replace the label on this step. */
  std::vector<Sym> emit;
  Weight weight;
  /** Summed states s: the weight is multiplied by the total weight of the
   *  fresh paths that start in s (the start symbol's value from s to end). */
  std::vector<int> fresh_factors;
};

struct Walk {
  /** One name per state; the end state is state_names.size(). */
  std::vector<std::string> state_names;
  std::vector<char> summed;
  /** States a fresh path may start in. */
  std::vector<int> starts;
  std::map<int, std::vector<WalkStep>> steps;  // by label

  int end() const { return static_cast<int>(state_names.size()); }
};

struct ProductResult {
  GrammarSpec controller;
  /** For each state, the total weight of fresh paths from it to the end
   *  (only computed for summed states). */
  std::vector<Weight> fresh_weight;
};

/** `controller` must have right-hand sides of length at most two. New
 *  symbols are interned into controller.symbols. */
ProductResult walk_product(const GrammarSpec& controller, const Walk& walk, const Semiring& sr,
                           const SolverConfig& cfg);

}  // namespace tlw::nf_detail

#endif
