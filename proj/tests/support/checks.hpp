#ifndef TLW_TESTS_CHECKS_HPP
#define TLW_TESTS_CHECKS_HPP

#include <map>
#include <random>
#include <string>
#include <vector>

#include "tlw/stringsum.hpp"
#include "tlw/two_level.hpp"

namespace tlw::testing {

/** Oracle weight of every string up to `max_len`, from one exhaustive
 *  search with the normal-form step bound unless `max_steps` is given.
 *  Strings with no derivation are absent. `complete` reports whether the
 *  step budget cut no branch. */
std::map<std::vector<int>, Weight> oracle_table(const TwoLevelGrammar& g, const Semiring& sr,
                                                int max_len, int max_steps = 0,
                                                bool* complete = nullptr);

/** Compares the chart of `s` with pop computations enumerated directly
 *  from the rules, item by item. Returns a description of each
 *  disagreement (empty when they agree). */
std::vector<std::string> chart_vs_pop_computations(const TwoLevelNF& g, const std::vector<int>& s,
                                                   const Semiring& sr);

/** A random weight for axiom checks, with zero, one and (for counting)
 *  infinity mixed in. */
Weight sample_weight(std::mt19937& rng, const Semiring& sr);

/** Violations of the semiring axioms over `n` sampled triples: both
 *  associativities, commutativity of plus, both distributivities, the
 *  identities and annihilation by zero. */
int axiom_violations(const Semiring& sr, int n, unsigned seed);

/** Number of chart items outside 0 <= i <= j <= k <= l <= n. */
int misshapen_items(const Chart& c);

}  // namespace tlw::testing

#endif
