#ifndef TLW_SRC_NF_INTERNAL_HPP
#define TLW_SRC_NF_INTERNAL_HPP

#include <map>
#include <string>
#include <vector>

#include "tlw/fixed_point.hpp"
#include "tlw/grammar.hpp"
#include "tlw/normal_forms.hpp"

namespace tlw::nf_detail {

SymbolTablePtr clone_table(const SymbolTablePtr& t);

/** A fresh `%` name derived from `base` (leading `%` characters dropped). */
int fresh_symbol(SymbolTable& t, Ns ns, const std::string& base);

/** Solves and throws UnsupportedOperation if the iteration does not settle. */
std::vector<Weight> solve(const FixedPointSystem& sys, const SolverConfig& cfg,
                          const std::string& what);

/** Sums duplicate rules and drops zero-weight, unproductive and unreachable
 *  ones. The start symbol is kept even if nothing remains. */
void trim_wcfg(GrammarSpec& g, const Semiring& sr);

/** In-place version of binarize_wcfg, interning into g.symbols. */
void binarize_in_place(GrammarSpec& g, const Semiring& sr);

/** cnf_convert_wcfg without the copy: fresh symbols go into g.symbols. */
void cnf_in_place(GrammarSpec& g, const Semiring& sr, const SolverConfig& cfg);

/** Re-interns every symbol of `g` by name into `t`. */
GrammarSpec rebase(const GrammarSpec& g, const SymbolTablePtr& t);

/** wpda_to_wcfg interning into p.symbols. */
GrammarSpec wpda_to_wcfg_in_place(const GrammarSpec& p, const Semiring& sr);

/** Copies A_R of the controller's nonterminals that only derive trees whose
 *  last leaf is a label, and makes the copy of the start symbol the new
 *  start. Under the stack discipline of a merged grammar a derivation can
 *  only finish on a label, so this is the language the controller really
 *  contributes. Does nothing if there are no empty rules. */
void right_anchor(GrammarSpec& g);

void require_variant(const GrammarSpec& g, Variant v, const char* what);

/** The whole WLD-CFG controllee pipeline: the controller comes back in CNF
 *  without an empty rule, and every controllee rule has a normal-form shape
 *  (possibly with one empty rule for the controllee start). */
ControlPair normalize_ldcfg_pair(const GrammarSpec& controller, const GrammarSpec& controllee,
                                 const Semiring& sr, const SolverConfig& cfg);

// Replaces labels in controller right-hand sides by symbol sequences.
inline void substitute(GrammarSpec& ctl, const std::map<int, std::vector<Sym>>& subst) {
  if (subst.empty()) return;
  for (auto& p : ctl.cfg) {
    std::vector<Sym> rhs;
    for (const Sym& s : p.rhs) {
      auto it = s.is_nt ? subst.end() : subst.find(s.id);
      if (it == subst.end())
        rhs.push_back(s);
      else
        rhs.insert(rhs.end(), it->second.begin(), it->second.end());
    }
    p.rhs = std::move(rhs);
  }
}

// Gives every controllee rule its own label. A shared label becomes a
// controller nonterminal with one rule per copy.
template <typename Rule>
void uniquify_labels(GrammarSpec& ctl, std::vector<Rule>& rules, const Semiring& sr) {
  SymbolTable& t = *ctl.symbols;
  std::map<int, int> count;
  for (const Rule& r : rules) ++count[r.label];
  std::map<int, std::vector<Sym>> subst;
  for (Rule& r : rules) {
    if (count[r.label] < 2) continue;
    auto [it, fresh] = subst.emplace(r.label, std::vector<Sym>{});
    if (fresh) it->second = {{true, fresh_symbol(t, Ns::controller_nt, "L_" + t.name(Ns::label, r.label))}};
    int copy = fresh_symbol(t, Ns::label, t.name(Ns::label, r.label));
    ctl.cfg.push_back({it->second[0].id, {{false, copy}}, sr.one()});
    r.label = copy;
  }
  substitute(ctl, subst);
}

}  // namespace tlw::nf_detail

#endif
