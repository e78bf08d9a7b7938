#ifndef TLW_ITEMS_HPP
#define TLW_ITEMS_HPP

#include <compare>

namespace tlw {

/** A position-decorated pop-computation type, shared by the chart and the
 *  brute-force enumerator so their outputs can be compared directly.
 *
 *  Ungapped: X[e, A] derives the substring i..l while the controllee moves
 *  from state p to state s (j, k, y, q, r, f are -1).
 *  Gapped: X[e, A ..] derives i..j, then the gap Y[f, ..] covering j..k
 *  (entered in state q, left in state r), then k..l, ending in state s. */
struct SpanItem {
  int i = 0, l = 0;
  int j = -1, k = -1;
  int x = 0, a = 0, y = -1;
  int p = 0, s = 0, q = -1, r = -1;
  int e = 0, f = -1;

  bool gapped() const { return y >= 0; }
  int span() const { return gapped() ? (j - i) + (l - k) : l - i; }
  friend auto operator<=>(const SpanItem&, const SpanItem&) = default;
};

}  // namespace tlw

#endif
