#include <algorithm>
#include <set>

#include "nf_internal.hpp"
#include "tlw/errors.hpp"
#include "tlw/normal_forms.hpp"

namespace tlw {

using namespace nf_detail;

namespace {

GrammarFile file_of(const ControlPair& p, bool generated) {
  GrammarFile f;
  f.symbols = p.controllee.symbols;
  f.controller = p.controller;
  f.controllee = p.controllee;
  f.generated = generated;
  const SymbolTable& t = *f.symbols;
  for (int ns = 0; ns < kNamespaceCount && !f.generated; ++ns)
    for (int id = 0; id < t.size(static_cast<Ns>(ns)) && !f.generated; ++id)
      f.generated = is_reserved_name(t.name(static_cast<Ns>(ns), id));
  return f;
}

// A controllee rule that rewrites the start symbol to nothing can only be
// used at the root, where the controller stack holds just its start symbol.
// Its label anywhere else leads nowhere, so those controller rules go.
void pin_empty_labels(ControlPair& p, const Semiring& sr) {
  std::set<int> empty_labels;
  for (const auto& r : p.controllee.ldcfg)
    if (r.rhs.empty()) empty_labels.insert(r.label);
  for (const auto& t : p.controllee.ldpda)
    if (t.push.empty() && t.scan < 0) empty_labels.insert(t.label);
  auto& rules = p.controller.cfg;
  const int start = p.controller.start;
  rules.erase(std::remove_if(rules.begin(), rules.end(),
                             [&](const WcfgProduction& r) {
                               return r.lhs != start && r.rhs.size() == 1 && !r.rhs[0].is_nt &&
                                      empty_labels.count(r.rhs[0].id) > 0;
                             }),
              rules.end());
  trim_wcfg(p.controller, sr);
}

void drop_empty_rules(GrammarSpec& g) {
  g.cfg.erase(std::remove_if(g.cfg.begin(), g.cfg.end(),
                             [](const WcfgProduction& r) { return r.rhs.empty(); }),
              g.cfg.end());
}

// Turns a CNF controller back into an automaton over the pair's table.
void controller_to_wpda(ControlPair& p, const Semiring& sr) {
  p.controller = cnf_to_wpda(p.controller, sr);
  p.controllee = rebase(p.controllee, p.controller.symbols);
}

}  // namespace

NfConversion nf_convert_two_level(const GrammarSpec& controller, const GrammarSpec& controllee,
                                  const SolverConfig& cfg) {
  const Semiring sr = semiring_of(controller, controllee);
  {
    SymbolTablePtr table = clone_table(controllee.symbols);
    ControlPair same{rebase(controller, table), controllee};
    same.controllee.symbols = table;
    try {
      TwoLevelNF nf = classify_nf(control(same.controller, same.controllee));
      return {std::move(nf), file_of(same, false), true};
    } catch (const NotNormalForm&) {
    }
  }

  const bool pda_controller = controller.variant == Variant::wpda;
  GrammarSpec ctl = controller;
  if (pda_controller) {
    require_variant(controller, Variant::wpda, "a WPDA controller");
    ctl = wpda_to_wcfg(controller, sr);
  }

  ControlPair p;
  if (controllee.variant == Variant::wldpda) {
    p = normalize_ldpda_controllee(ctl, controllee, sr);
    right_anchor(p.controller);
    cnf_in_place(p.controller, sr, cfg);
    drop_empty_rules(p.controller);
  } else {
    p = normalize_ldcfg_pair(ctl, controllee, sr, cfg);
  }
  pin_empty_labels(p, sr);
  if (pda_controller) controller_to_wpda(p, sr);

  TwoLevelNF nf = classify_nf(control(p.controller, p.controllee));
  return {std::move(nf), file_of(p, true), false};
}

}  // namespace tlw
