#ifndef TLW_ORACLE_HPP
#define TLW_ORACLE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "tlw/items.hpp"
#include "tlw/two_level.hpp"

namespace tlw {

/** Search budget. Lengths count terminals, steps count rule applications. */
struct OracleOptions {
  int max_len = 6;
  int max_steps = 60;
  /** Keep every derivation found (rule index sequence). */
  bool record = false;
  /** Search nodes before ResourceExceeded; 0 reads TLW_NODE_CAP or uses
   *  the default of five million. */
  std::size_t node_cap = 0;
};

struct OracleDerivation {
  std::vector<int> rules;
  std::vector<int> yield;
  Weight weight;
};

struct StringWeight {
  std::vector<int> yield;
  Weight weight;
};

struct EnumerateResult {
  /** Sorted by yield (shorter strings first, then lexicographic ids). */
  std::vector<StringWeight> strings;
  /** True when no branch was cut by the step budget, or the grammar is in
   *  normal form and the budget reaches step_bound(max_len). */
  bool complete = true;
  bool normal_form = false;
  std::size_t nodes = 0;
  /** Longest derivation found, in steps. */
  int longest = 0;
  std::vector<OracleDerivation> derivations;
};

/** Steps sufficient for every normal-form derivation of a string of length
 *  at most n. Normal-form derivations of a length-n string take exactly
 *  3n - 2 steps, so this leaves a wide margin. */
int step_bound(int n);

/** All derivations within the budget, aggregated per yield. Leftmost
 *  rewriting only, so each derivation tree is counted once. */
EnumerateResult enumerate(const TwoLevelGrammar& g, const Semiring& sr, const OracleOptions& opt);

/** Restricts the search to derivations of exactly `s`. */
EnumerateResult enumerate_string(const TwoLevelGrammar& g, const Semiring& sr,
                                 const std::vector<int>& s, const OracleOptions& opt);

/** Total weight of derivations of `s` within `max_steps` (or step_bound
 *  of |s| when max_steps <= 0). */
Weight oracle_stringsum(const TwoLevelGrammar& g, const Semiring& sr, const std::vector<int>& s,
                        int max_steps = 0);

/** Sum over derivations of at most `max_steps` steps and yields of at most
 *  `max_len` terminals: a lower bound on the allsum, monotone in both. */
Weight oracle_allsum_truncated(const TwoLevelGrammar& g, const Semiring& sr, int max_steps,
                               int max_len = 8);

/** Applies rules in leftmost order from the start configuration. Returns
 *  nullopt if some step is not applicable or the result is incomplete. */
std::optional<OracleDerivation> replay(const TwoLevelGrammar& g, const Semiring& sr,
                                       const std::vector<int>& rules);

/** Enumerates, directly from the rules, every pop computation over the
 *  string `str` that starts with X[e, A] in controllee state p, and sums
 *  their weights by type. Only sound for normal-form grammars, where each
 *  stack symbol accounts for at least one terminal. */
std::map<SpanItem, Weight> enumerate_pop_computations(const TwoLevelGrammar& g, const Semiring& sr,
                                                     const std::vector<int>& str, int x, int a,
                                                     int e, int p);

}  // namespace tlw

#endif
