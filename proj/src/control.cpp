#include <algorithm>
#include <map>
#include <set>

#include "tlw/errors.hpp"
#include "tlw/two_level.hpp"

namespace tlw {

std::string to_string(Formalism f) {
  switch (f) {
    case Formalism::cc: return "cfg>cfg";
    case Formalism::pc: return "pda>cfg";
    case Formalism::cp: return "cfg>pda";
    case Formalism::pp: return "pda>pda";
  }
  return "?";
}

bool controller_is_pda(Formalism f) { return f == Formalism::pc || f == Formalism::pp; }
bool controllee_is_pda(Formalism f) { return f == Formalism::cp || f == Formalism::pp; }

Formalism formalism_of(Variant controller, Variant controllee) {
  bool c_pda = controller == Variant::wpda;
  bool e_pda = controllee == Variant::wldpda;
  if (c_pda) return e_pda ? Formalism::pp : Formalism::pc;
  return e_pda ? Formalism::cp : Formalism::cc;
}

std::string to_string(RuleKind k) {
  switch (k) {
    case RuleKind::eps: return "eps";
    case RuleKind::term: return "term";
    case RuleKind::pop_left: return "pop-left";
    case RuleKind::pop_right: return "pop-right";
    case RuleKind::push: return "push";
    case RuleKind::nullary: return "nullary";
    case RuleKind::unary_controllee: return "unary-controllee";
    case RuleKind::unary_controller: return "unary-controller";
    case RuleKind::general: return "general";
  }
  return "?";
}

bool is_nf_kind(RuleKind k) {
  return k == RuleKind::eps || k == RuleKind::term || k == RuleKind::pop_left ||
         k == RuleKind::pop_right || k == RuleKind::push;
}

namespace {

// Builds the merged rule set. The result owns a fresh symbol table seeded
// with the controllee's symbols; controller symbols are re-interned by name
// so that labels written on both sides meet.
class Merger {
 public:
  Merger(const GrammarSpec& ctl, const GrammarSpec& cte, const Semiring& sr)
      : ctl_(ctl), cte_(cte), sr_(sr) {}

  TwoLevelGrammar run() {
    g_.formalism = formalism_of(ctl_.variant, cte_.variant);
    g_.symbols = std::make_shared<SymbolTable>(*cte_.symbols);
    g_.start = cte_.start;
    g_.ctl_start = map(ctl_.nt_ns(), ctl_.start);
    if (cte_.variant == Variant::wldpda) {
      g_.init_state = cte_.init_state;
      g_.final_state = cte_.final_state;
      g_.n_states = std::max(1, cte_.symbols->size(Ns::controllee_state));
    }
    if (ctl_.variant == Variant::wpda) {
      g_.ctl_init = map(Ns::controller_state, ctl_.init_state);
      g_.ctl_final = map(Ns::controller_state, ctl_.final_state);
      g_.n_ctl_states = std::max(1, ctl_.symbols->size(Ns::controller_state));
    }
    index_controllee();
    if (ctl_.variant == Variant::wcfg)
      cfg_controller();
    else
      pda_controller();
    for (int l : used_labels_) {
      if (!by_label_.count(l))
        g_.warnings.push_back("label \"" + g_.symbols->name(Ns::label, l) +
                              "\" has no controllee rule");
    }
    if (dropped_ > 0)
      g_.warnings.push_back(std::to_string(dropped_) +
                            " merged rules can never apply and were left out");
    assign_kinds(g_);
    return std::move(g_);
  }

 private:
  int map(Ns ns, int id) {
    if (ctl_.symbols == cte_.symbols) return id;
    return g_.symbols->intern(ns, ctl_.symbols->name(ns, id));
  }

  // A controllee rule reduced to what merging needs.
  struct Piece {
    int src;
    int lhs, from, to, scan, dist;
    std::vector<Unit> rhs;
    Weight w;
  };

  void index_controllee() {
    if (cte_.variant == Variant::wldcfg) {
      for (std::size_t i = 0; i < cte_.ldcfg.size(); ++i) {
        const auto& p = cte_.ldcfg[i];
        Piece pc{static_cast<int>(i), p.lhs, 0, 0, -1, p.distinguished_index - 1, {}, p.weight};
        for (const Sym& s : p.rhs) pc.rhs.push_back({!s.is_nt, s.id});
        by_label_[p.label].push_back(std::move(pc));
      }
    } else {
      for (std::size_t i = 0; i < cte_.ldpda.size(); ++i) {
        const auto& t = cte_.ldpda[i];
        Piece pc{static_cast<int>(i), t.pop, t.from, t.to, t.scan, t.distinguished_index - 1, {}, t.weight};
        for (int s : t.push) pc.rhs.push_back({false, s});
        by_label_[t.label].push_back(std::move(pc));
      }
    }
  }

  // X[e, A..] -> X[f, beta..] for every controllee nonterminal and state.
  void stack_rewrites(int src, int a, int e, int f, const std::vector<int>& beta,
                      const Weight& w) {
    int n_nt = cte_.symbols->size(Ns::controllee_nt);
    for (int x = 0; x < n_nt; ++x) {
      for (int p = 0; p < g_.n_states; ++p) {
        TwoLevelRule r;
        r.lhs = x;
        r.pop = a;
        r.from_state = r.to_state = p;
        r.ctl_from = e;
        r.ctl_to = f;
        r.push = beta;
        r.rhs = {{false, x}};
        r.dist = 0;
        r.weight = w;
        r.controller_src = src;
        g_.rules.push_back(std::move(r));
      }
    }
  }

  void label_merge(int src, int a, int e, int f, const std::vector<int>& beta, int label,
                   const Weight& w) {
    used_labels_.insert(label);
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return;
    for (const Piece& pc : it->second) {
      // A rule without a distinguished child ends the controller run; it can
      // only apply if nothing is pushed and the controller stops in its
      // final state.
      if (pc.dist < 0 && (!beta.empty() || f != g_.ctl_final)) {
        ++dropped_;
        continue;
      }
      TwoLevelRule r;
      r.lhs = pc.lhs;
      r.pop = a;
      r.from_state = pc.from;
      r.to_state = pc.to;
      r.ctl_from = e;
      r.ctl_to = f;
      r.push = beta;
      r.rhs = pc.rhs;
      r.dist = pc.dist;
      r.scan = pc.scan;
      r.weight = sr_.times(w, pc.w);
      r.controller_src = src;
      r.controllee_src = pc.src;
      g_.rules.push_back(std::move(r));
    }
  }

  void cfg_controller() {
    // Labels inside longer right-hand sides get a private nonterminal that
    // rewrites to the label alone.
    std::map<int, int> label_nt;
    std::vector<std::pair<int, int>> pending;
    for (std::size_t i = 0; i < ctl_.cfg.size(); ++i) {
      const auto& p = ctl_.cfg[i];
      int src = static_cast<int>(i);
      int a = map(Ns::controller_nt, p.lhs);
      if (p.rhs.size() == 1 && !p.rhs[0].is_nt) {
        label_merge(src, a, 0, 0, {}, map(Ns::label, p.rhs[0].id), p.weight);
        continue;
      }
      std::vector<int> beta;
      for (const Sym& s : p.rhs) {
        if (s.is_nt) {
          beta.push_back(map(Ns::controller_nt, s.id));
          continue;
        }
        int l = map(Ns::label, s.id);
        auto [it, fresh] = label_nt.emplace(l, -1);
        if (fresh) {
          it->second = g_.symbols->fresh(Ns::controller_nt, "L_" + g_.symbols->name(Ns::label, l));
          pending.emplace_back(it->second, l);
        }
        beta.push_back(it->second);
      }
      stack_rewrites(src, a, 0, 0, beta, p.weight);
    }
    for (auto [nt, l] : pending) label_merge(-1, nt, 0, 0, {}, l, sr_.one());
  }

  void pda_controller() {
    for (std::size_t i = 0; i < ctl_.pda.size(); ++i) {
      const auto& t = ctl_.pda[i];
      if (t.pop.size() != 1)
        throw NotNormalForm({"controller transition " + std::to_string(i + 1) +
                             " does not pop exactly one symbol"});
      int src = static_cast<int>(i);
      int a = map(Ns::controller_nt, t.pop[0]);
      int e = map(Ns::controller_state, t.from);
      int f = map(Ns::controller_state, t.to);
      std::vector<int> beta;
      for (int s : t.push) beta.push_back(map(Ns::controller_nt, s));
      if (t.scan < 0)
        stack_rewrites(src, a, e, f, beta, t.weight);
      else
        label_merge(src, a, e, f, beta, map(Ns::label, t.scan), t.weight);
    }
  }

  const GrammarSpec& ctl_;
  const GrammarSpec& cte_;
  Semiring sr_;
  TwoLevelGrammar g_;
  std::map<int, std::vector<Piece>> by_label_;
  std::set<int> used_labels_;
  int dropped_ = 0;
};

void require(const GrammarSpec& g, Variant v, Role role, const char* what) {
  if (g.variant != v || g.role != role)
    throw TypeError(std::string("expected ") + what + ", got a " + to_string(g.variant) +
                    (g.role == Role::controller ? " controller" : " controllee"));
  if (!g.symbols) throw TypeError(std::string(what) + " has no symbol table");
  ValidationReport rep = validate(g);
  if (!rep.ok()) throw LoadError(rep.errors());
}

}  // namespace

Semiring semiring_of(const GrammarSpec& a, const GrammarSpec& b) {
  auto first = [](const GrammarSpec& g) -> const Weight* {
    if (!g.cfg.empty()) return &g.cfg[0].weight;
    if (!g.ldcfg.empty()) return &g.ldcfg[0].weight;
    if (!g.pda.empty()) return &g.pda[0].weight;
    if (!g.ldpda.empty()) return &g.ldpda[0].weight;
    return nullptr;
  };
  const Weight* wa = first(a);
  const Weight* wb = first(b);
  if (wa && wb && wa->kind != wb->kind)
    throw TypeError("controller and controllee weights come from different semirings");
  if (wa) return Semiring(wa->kind);
  if (wb) return Semiring(wb->kind);
  return Semiring::real();
}

TwoLevelGrammar control_cfg_cfg(const GrammarSpec& controller, const GrammarSpec& controllee) {
  require(controller, Variant::wcfg, Role::controller, "a WCFG controller");
  require(controllee, Variant::wldcfg, Role::controllee, "a WLD-CFG controllee");
  return Merger(controller, controllee, semiring_of(controller, controllee)).run();
}

TwoLevelGrammar control_pda_cfg(const GrammarSpec& controller, const GrammarSpec& controllee) {
  require(controller, Variant::wpda, Role::controller, "a WPDA controller");
  require(controllee, Variant::wldcfg, Role::controllee, "a WLD-CFG controllee");
  return Merger(controller, controllee, semiring_of(controller, controllee)).run();
}

TwoLevelGrammar control_cfg_pda(const GrammarSpec& controller, const GrammarSpec& controllee) {
  require(controller, Variant::wcfg, Role::controller, "a WCFG controller");
  require(controllee, Variant::wldpda, Role::controllee, "a WLD-PDA controllee");
  return Merger(controller, controllee, semiring_of(controller, controllee)).run();
}

TwoLevelGrammar control_pda_pda(const GrammarSpec& controller, const GrammarSpec& controllee) {
  require(controller, Variant::wpda, Role::controller, "a WPDA controller");
  require(controllee, Variant::wldpda, Role::controllee, "a WLD-PDA controllee");
  return Merger(controller, controllee, semiring_of(controller, controllee)).run();
}

TwoLevelGrammar control(const GrammarSpec& controller, const GrammarSpec& controllee) {
  switch (formalism_of(controller.variant, controllee.variant)) {
    case Formalism::cc: return control_cfg_cfg(controller, controllee);
    case Formalism::pc: return control_pda_cfg(controller, controllee);
    case Formalism::cp: return control_cfg_pda(controller, controllee);
    case Formalism::pp: return control_pda_pda(controller, controllee);
  }
  throw TypeError("unknown formalism");
}

RuleKind rule_shape(const TwoLevelGrammar& g, const TwoLevelRule& r) {
  const bool no_dist = r.dist < 0;
  const bool ends_controller = no_dist && r.push.empty() && r.ctl_to == g.ctl_final;
  if (r.rhs.empty() && r.scan < 0 && no_dist) {
    bool at_start = r.lhs == g.start && r.pop == g.ctl_start && r.from_state == g.init_state &&
                    r.to_state == g.final_state && r.ctl_from == g.ctl_init && ends_controller;
    return at_start ? RuleKind::eps : RuleKind::nullary;
  }
  if (ends_controller) {
    bool cfg_term = r.rhs.size() == 1 && r.rhs[0].terminal && r.scan < 0 &&
                    r.from_state == r.to_state;
    bool pda_term = r.rhs.empty() && r.scan >= 0;
    if (cfg_term || pda_term) return RuleKind::term;
  }
  if (r.scan < 0 && r.rhs.size() == 2 && !r.rhs[0].terminal && !r.rhs[1].terminal &&
      r.push.empty()) {
    if (r.dist == 0) return RuleKind::pop_left;
    if (r.dist == 1) return RuleKind::pop_right;
  }
  if (r.scan < 0 && r.rhs.size() == 1 && !r.rhs[0].terminal && r.dist == 0) {
    bool stack_only = r.rhs[0].sym == r.lhs && r.to_state == r.from_state;
    if (stack_only && r.push.size() == 2) return RuleKind::push;
    if (stack_only && r.push.size() == 1) return RuleKind::unary_controller;
    if (r.push.empty()) return RuleKind::unary_controllee;
  }
  return RuleKind::general;
}

void assign_kinds(TwoLevelGrammar& g) {
  for (auto& r : g.rules) r.kind = rule_shape(g, r);
}

TwoLevelNF classify_nf(TwoLevelGrammar g) {
  std::vector<std::string> bad;
  for (auto& r : g.rules) {
    r.kind = rule_shape(g, r);
    if (!is_nf_kind(r.kind)) {
      bad.push_back(describe_rule(g, r) + "  (" + to_string(r.kind) + ")");
      continue;
    }
    for (const Unit& u : r.rhs) {
      if (!u.terminal && u.sym == g.start && r.kind != RuleKind::push) {
        bad.push_back(describe_rule(g, r) + "  (start symbol on a right-hand side)");
        break;
      }
    }
    if (r.kind == RuleKind::push &&
        (r.push[0] == g.ctl_start || r.push[1] == g.ctl_start))
      bad.push_back(describe_rule(g, r) + "  (controller start symbol pushed)");
  }
  if (!bad.empty()) throw NotNormalForm(std::move(bad));
  return TwoLevelNF(std::move(g));
}

std::string describe_rule(const TwoLevelGrammar& g, const TwoLevelRule& r) {
  const SymbolTable& t = *g.symbols;
  const bool cs = controller_is_pda(g.formalism);
  const bool es = controllee_is_pda(g.formalism);
  auto nt = [&](int x) { return t.name(Ns::controllee_nt, x); };
  auto cn = [&](int a) { return t.name(Ns::controller_nt, a); };
  auto cstate = [&](int e) { return cs ? t.name(Ns::controller_state, e) + ":" : std::string(); };
  auto estate = [&](int p) { return es ? t.name(Ns::controllee_state, p) + ", " : std::string(); };

  std::string s = estate(r.from_state) + nt(r.lhs) + "[" + cstate(r.ctl_from) + cn(r.pop);
  s += r.dist >= 0 ? " ..] ->" : "] ->";
  if (es) s += " " + t.name(Ns::controllee_state, r.to_state) + ",";
  if (r.scan >= 0) s += " '" + t.name(Ns::terminal, r.scan) + "'";
  for (std::size_t i = 0; i < r.rhs.size(); ++i) {
    const Unit& u = r.rhs[i];
    if (u.terminal) {
      s += " '" + t.name(Ns::terminal, u.sym) + "'";
    } else if (static_cast<int>(i) == r.dist) {
      s += " " + nt(u.sym) + "[" + cstate(r.ctl_to);
      for (int b : r.push) s += cn(b) + " ";
      s += "..]";
    } else {
      s += " " + nt(u.sym) + "[" + cstate(g.ctl_init) + cn(g.ctl_start) + "]";
    }
  }
  if (r.rhs.empty() && r.scan < 0) s += " eps";
  return s;
}

}  // namespace tlw
