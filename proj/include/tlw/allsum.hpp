#ifndef TLW_ALLSUM_HPP
#define TLW_ALLSUM_HPP

#include <string>
#include <vector>

#include "tlw/fixed_point.hpp"
#include "tlw/two_level.hpp"

namespace tlw {

/** A pop-computation type without string positions.
 *
 *  Ungapped: X with controller stack [e, A] runs the controllee from state p
 *  to state s. Gapped: X with controller stack [e, A ..] runs from p to s and
 *  leaves the single descendant Y[f, ..], which runs from q to r, as its gap.
 *  Unused fields are -1. */
struct AllsumItem {
  bool gapped = false;
  int x = 0, a = 0, y = -1;
  int p = 0, s = 0, q = -1, r = -1;
  int e = 0, f = -1;

  friend bool operator==(const AllsumItem& l, const AllsumItem& r) {
    return l.gapped == r.gapped && l.x == r.x && l.a == r.a && l.y == r.y && l.p == r.p &&
           l.s == r.s && l.q == r.q && l.r == r.r && l.e == r.e && l.f == r.f;
  }
};

std::string describe_item(const TwoLevelGrammar& g, const AllsumItem& it);

struct AllsumItemValue {
  AllsumItem item;
  Weight value;
};

struct AllsumResult {
  Weight value;
  SolveStatus status = SolveStatus::converged;
  int sweeps = 0;
  int items = 0;
  std::size_t terms = 0;
  int monotonicity_violations = 0;
  /** Every derivable item with its solved value, goal first. */
  std::vector<AllsumItemValue> item_values;
};

struct AllsumOptions {
  SolverConfig solver;
  /** Also solve every ungapped and gapped item, not just those the goal
   *  depends on. Only sensible for small grammars. */
  bool all_items = false;
};

/** Total weight of all derivations. Works on any merged grammar whose stack
 *  rewrites are finite (the normal forms and every pre-normal-form shape).
 *  The status is `diverged` when the sweep budget runs out or the goal is
 *  infinite. Throws UnsupportedOperation for semirings that are neither
 *  omega-continuous nor idempotent. */
AllsumResult allsum(const TwoLevelGrammar& g, const Semiring& sr, const AllsumOptions& opt = {});
AllsumResult allsum(const TwoLevelNF& g, const Semiring& sr, const AllsumOptions& opt = {});

/** Same computation; exposes every solved item. */
AllsumResult allsum_items(const TwoLevelGrammar& g, const Semiring& sr,
                          const AllsumOptions& opt = {});

}  // namespace tlw

#endif
