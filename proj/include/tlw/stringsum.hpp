#ifndef TLW_STRINGSUM_HPP
#define TLW_STRINGSUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "tlw/items.hpp"
#include "tlw/two_level.hpp"

namespace tlw {

struct ChartEntry {
  SpanItem item;
  Weight weight;
};

/** The filled chart: every derivable item of a string with its weight. */
struct Chart {
  int n = 0;
  Weight goal;
  std::vector<ChartEntry> entries;
  std::size_t ungapped = 0;
  std::size_t gapped = 0;
};

/** Fills the chart bottom-up by span, ungapped items before gapped items
 *  of the same span. Throws InputError for symbols outside the terminal
 *  alphabet. */
Chart fill_chart(const TwoLevelNF& g, const std::vector<int>& s, const Semiring& sr);

/** Weight of all derivations of `s`. */
Weight stringsum(const TwoLevelNF& g, const std::vector<int>& s, const Semiring& sr);

struct BestDerivation {
  Weight weight;
  /** Rule indices in leftmost-derivation order. */
  std::vector<int> rules;
};

/** A maximum-weight derivation of `s`, or nullopt if there is none.
 *  Throws UnsupportedOperation unless the semiring is idempotent. */
std::optional<BestDerivation> best_derivation(const TwoLevelNF& g, const std::vector<int>& s,
                                              const Semiring& sr);

/** Upper bound on the number of gapped items for a string of length n:
 *  position tuples times symbol and state choices. */
double gapped_item_bound(const TwoLevelGrammar& g, int n);

/** One JSON object per line for every chart entry. */
std::string chart_to_jsonl(const TwoLevelGrammar& g, const Chart& c, const Semiring& sr);

/** Maps terminal names to ids; throws InputError for unknown names. */
std::vector<int> terminal_ids(const TwoLevelGrammar& g, const std::vector<std::string>& names);

}  // namespace tlw

#endif
