#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "nf_internal.hpp"
#include "tlw/errors.hpp"
#include "tlw/normal_forms.hpp"
#include "walk_product.hpp"

namespace tlw {

namespace nf_detail {

GrammarSpec rebase(const GrammarSpec& g, const SymbolTablePtr& t) {
  if (g.symbols == t) return g;
  GrammarSpec h = g;
  h.symbols = t;
  const SymbolTable& from = *g.symbols;
  const Ns nts = g.nt_ns();
  const Ns states = g.state_ns();
  auto nt = [&](int id) { return t->intern(nts, from.name(nts, id)); };
  auto st = [&](int id) { return t->intern(states, from.name(states, id)); };
  auto label = [&](int id) { return t->intern(Ns::label, from.name(Ns::label, id)); };
  auto term = [&](Ns ns, int id) { return t->intern(ns, from.name(ns, id)); };
  h.start = nt(g.start);
  if (g.variant == Variant::wpda || g.variant == Variant::wldpda) {
    h.init_state = st(g.init_state);
    h.final_state = st(g.final_state);
  }
  for (int& a : h.declared_terminals) a = term(g.term_ns(), a);
  auto rhs = [&](std::vector<Sym>& r, Ns term_ns) {
    for (Sym& s : r) s.id = s.is_nt ? nt(s.id) : term(term_ns, s.id);
  };
  for (auto& p : h.cfg) {
    p.lhs = nt(p.lhs);
    rhs(p.rhs, g.term_ns());
  }
  for (auto& p : h.ldcfg) {
    p.label = label(p.label);
    p.lhs = nt(p.lhs);
    rhs(p.rhs, Ns::terminal);
  }
  for (auto& p : h.pda) {
    p.from = st(p.from);
    p.to = st(p.to);
    for (int& x : p.pop) x = nt(x);
    for (int& x : p.push) x = nt(x);
    if (p.scan >= 0) p.scan = term(g.term_ns(), p.scan);
  }
  for (auto& p : h.ldpda) {
    p.label = label(p.label);
    p.from = st(p.from);
    p.to = st(p.to);
    p.pop = nt(p.pop);
    for (int& x : p.push) x = nt(x);
    if (p.scan >= 0) p.scan = term(Ns::terminal, p.scan);
  }
  return h;
}

void right_anchor(GrammarSpec& g) {
  bool has_empty = std::any_of(g.cfg.begin(), g.cfg.end(),
                               [](const WcfgProduction& p) { return p.rhs.empty(); });
  if (!has_empty) return;
  SymbolTable& t = *g.symbols;
  const Ns nts = g.nt_ns();
  std::map<int, std::vector<std::size_t>> by_lhs;
  for (std::size_t i = 0; i < g.cfg.size(); ++i) by_lhs[g.cfg[i].lhs].push_back(i);
  std::map<int, int> anchored;
  std::vector<int> todo;
  auto copy_of = [&](int a) {
    auto [it, fresh] = anchored.emplace(a, -1);
    if (fresh) {
      it->second = fresh_symbol(t, nts, t.name(nts, a) + "_R");
      todo.push_back(a);
    }
    return it->second;
  };
  int start = copy_of(g.start);
  std::vector<WcfgProduction> extra;
  while (!todo.empty()) {
    int a = todo.back();
    todo.pop_back();
    for (std::size_t i : by_lhs[a]) {
      if (g.cfg[i].rhs.empty()) continue;
      WcfgProduction p = g.cfg[i];
      p.lhs = anchored.at(a);
      if (p.rhs.back().is_nt) p.rhs.back().id = copy_of(p.rhs.back().id);
      extra.push_back(std::move(p));
    }
  }
  g.cfg.insert(g.cfg.end(), extra.begin(), extra.end());
  g.start = start;
}

}  // namespace nf_detail

using namespace nf_detail;

namespace {

void require_pair(const GrammarSpec& ctl, const GrammarSpec& cte) {
  require_variant(ctl, Variant::wcfg, "a WCFG controller");
  require_variant(cte, Variant::wldcfg, "a WLD-CFG controllee");
  if (ctl.role != Role::controller || !ctl.terminals_are_labels)
    throw TypeError("the controller must be a controller block over labels");
  if (cte.role != Role::controllee) throw TypeError("the controllee must be a controllee block");
}

// Both grammars re-interned into one private copy of the controllee's table.
ControlPair common_table(const GrammarSpec& ctl, const GrammarSpec& cte) {
  SymbolTablePtr t = clone_table(cte.symbols);
  ControlPair p{rebase(ctl, t), cte};
  p.controllee.symbols = t;
  return p;
}

// Drops controller rules that mention labels without controllee rules and
// controllee rules whose labels the controller never uses.
template <typename Rule>
void drop_unmatched(GrammarSpec& ctl, std::vector<Rule>& rules) {
  std::set<int> have, used;
  for (const Rule& r : rules) have.insert(r.label);
  std::vector<WcfgProduction> kept;
  for (const auto& p : ctl.cfg) {
    bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                          [&](const Sym& s) { return s.is_nt || have.count(s.id); });
    if (!ok) continue;
    for (const Sym& s : p.rhs)
      if (!s.is_nt) used.insert(s.id);
    kept.push_back(p);
  }
  ctl.cfg = std::move(kept);
  rules.erase(std::remove_if(rules.begin(), rules.end(),
                             [&](const Rule& r) { return !used.count(r.label); }),
              rules.end());
}

// Splits a rule with more than two units into binary links along the
// distinguished path: units left of the distinguished one are peeled off
// first, then units to its right from the far end. Returns the labels in
// path order; the first link keeps the rule's label and weight.
std::vector<int> chain(const WldcfgProduction& r, SymbolTable& t, const Semiring& sr,
                       std::vector<WldcfgProduction>& out) {
  if (r.rhs.size() <= 2) {
    out.push_back(r);
    return {r.label};
  }
  const int d = r.distinguished_index - 1;
  std::deque<Sym> left(r.rhs.begin(), r.rhs.begin() + d);
  std::deque<Sym> right(r.rhs.begin() + d + 1, r.rhs.end());
  const Sym core = r.rhs[d];
  std::vector<int> labels;
  int lhs = r.lhs;
  int label = r.label;
  Weight w = r.weight;
  while (left.size() + right.size() > 1) {
    int rest = fresh_symbol(t, Ns::controllee_nt, t.name(Ns::controllee_nt, r.lhs) + "_c");
    if (!left.empty()) {
      out.push_back({label, lhs, {left.front(), {true, rest}}, 2, w});
      left.pop_front();
    } else {
      out.push_back({label, lhs, {{true, rest}, right.back()}, 1, w});
      right.pop_back();
    }
    labels.push_back(label);
    lhs = rest;
    label = fresh_symbol(t, Ns::label, t.name(Ns::label, r.label));
    w = sr.one();
  }
  if (!left.empty())
    out.push_back({label, lhs, {left.front(), core}, 2, w});
  else
    out.push_back({label, lhs, {core, right.front()}, 1, w});
  labels.push_back(label);
  return labels;
}

// Brings a pair into the shape both passes rely on:
//  - the controller starts with a fresh symbol whose derivations all end in
//    a label, and its right-hand sides have at most two symbols;
//  - every controllee rule has its own label and is X -> a, X -> (empty),
//    or has a distinguished child and at most two units, all nonterminals;
//  - the controllee start symbol is fresh and on no right-hand side.
// Rules without a distinguished child become rules whose first unit is
// distinguished; the controller continues the path with a fresh start.
ControlPair prepare_pair(const GrammarSpec& controller, const GrammarSpec& controllee,
                         const Semiring& sr) {
  require_pair(controller, controllee);
  ControlPair p = common_table(controller, controllee);
  GrammarSpec& ctl = p.controller;
  GrammarSpec& cte = p.controllee;
  SymbolTable& t = *ctl.symbols;

  right_anchor(ctl);
  const int fresh_start = fresh_symbol(t, Ns::controller_nt, t.name(Ns::controller_nt, controller.start));
  ctl.cfg.push_back({fresh_start, {{true, ctl.start}}, sr.one()});
  ctl.start = fresh_start;

  drop_unmatched(ctl, cte.ldcfg);
  uniquify_labels(ctl, cte.ldcfg, sr);

  std::map<int, std::vector<Sym>> subst;
  std::map<int, int> pre_terminal;
  std::vector<WldcfgProduction> rules;
  auto pre_terminal_of = [&](int a) {
    auto [it, fresh] = pre_terminal.emplace(a, -1);
    if (fresh) {
      it->second = fresh_symbol(t, Ns::controllee_nt, "T_" + t.name(Ns::terminal, a));
      int label = fresh_symbol(t, Ns::label, "t_" + t.name(Ns::terminal, a));
      rules.push_back({label, it->second, {{false, a}}, 0, sr.one()});
      ctl.cfg.push_back({fresh_start, {{false, label}}, sr.one()});
    }
    return it->second;
  };
  for (WldcfgProduction r : cte.ldcfg) {
    bool simple = r.rhs.empty() ||
                  (r.rhs.size() == 1 && !r.rhs[0].is_nt && r.distinguished_index == 0);
    if (simple) {
      rules.push_back(r);
      continue;
    }
    for (Sym& s : r.rhs) {
      if (!s.is_nt) s = {true, pre_terminal_of(s.id)};
    }
    std::vector<Sym> tail;
    if (r.distinguished_index == 0) {
      r.distinguished_index = 1;
      tail.push_back({true, fresh_start});
    }
    std::vector<int> labels = chain(r, t, sr, rules);
    if (labels.size() > 1 || !tail.empty()) {
      std::vector<Sym> seq;
      for (int l : labels) seq.push_back({false, l});
      seq.insert(seq.end(), tail.begin(), tail.end());
      subst[r.label] = std::move(seq);
    }
  }
  substitute(ctl, subst);

  const int start = fresh_symbol(t, Ns::controllee_nt, t.name(Ns::controllee_nt, cte.start));
  const int start_label = fresh_symbol(t, Ns::label, "start");
  rules.push_back({start_label, start, {{true, cte.start}}, 1, sr.one()});
  ctl.cfg.push_back({fresh_start, {{false, start_label}, {true, fresh_start}}, sr.one()});
  cte.start = start;
  cte.ldcfg = std::move(rules);

  binarize_in_place(ctl, sr);
  trim_wcfg(ctl, sr);
  return p;
}

// Controllee nonterminals that occur in the grammar, start first.
std::vector<int> controllee_symbols(const GrammarSpec& cte) {
  std::vector<int> out{cte.start};
  std::set<int> seen{cte.start};
  auto add = [&](int x) {
    if (seen.insert(x).second) out.push_back(x);
  };
  for (const auto& r : cte.ldcfg) {
    add(r.lhs);
    for (const Sym& s : r.rhs)
      if (s.is_nt) add(s.id);
  }
  return out;
}

void keep_used_labels(ControlPair& p) {
  std::set<int> used;
  for (const auto& r : p.controller.cfg)
    for (const Sym& s : r.rhs)
      if (!s.is_nt) used.insert(s.id);
  auto& rules = p.controllee.ldcfg;
  rules.erase(std::remove_if(rules.begin(), rules.end(),
                             [&](const WldcfgProduction& r) { return !used.count(r.label); }),
              rules.end());
}

// Walk states: X (the path so far has a nonempty yield below X) and X^0
// (everything below X is empty). A path starts nonempty; once it steps into
// an empty child it stays empty, so that part is summed out. The rule that
// steps into the empty child keeps its other, nonempty child as the new
// distinguished one, and the controller starts a fresh path there.
ControlPair nullary_pass(const ControlPair& in, const Semiring& sr, const SolverConfig& cfg) {
  ControlPair out = in;
  SymbolTable& t = *out.controller.symbols;
  std::vector<int> xs = controllee_symbols(in.controllee);
  std::map<int, int> index;
  Walk walk;
  for (int x : xs) {
    index[x] = static_cast<int>(walk.state_names.size());
    walk.state_names.push_back(t.name(Ns::controllee_nt, x));
    walk.state_names.push_back(t.name(Ns::controllee_nt, x) + "^0");
    walk.summed.push_back(0);
    walk.summed.push_back(1);
  }
  auto full = [&](int x) { return index.at(x); };
  auto empty = [&](int x) { return index.at(x) + 1; };
  for (int x : xs) walk.starts.push_back(full(x));
  const int end = walk.end();

  std::vector<WldcfgProduction> rules;
  for (const auto& r : in.controllee.ldcfg) {
    auto& steps = walk.steps[r.label];
    const int x = r.lhs;
    if (r.rhs.empty()) {
      steps.push_back({empty(x), end, {}, r.weight, {}});
      continue;
    }
    rules.push_back(r);
    if (r.distinguished_index == 0) {
      steps.push_back({full(x), end, {{false, r.label}}, sr.one(), {}});
      continue;
    }
    const int d = r.distinguished_index - 1;
    const int y = r.rhs[d].id;
    steps.push_back({full(x), full(y), {{false, r.label}}, sr.one(), {}});
    if (r.rhs.size() == 1) {
      steps.push_back({empty(x), empty(y), {}, r.weight, {}});
      continue;
    }
    const Sym other = r.rhs[1 - d];
    const int w = other.id;
    steps.push_back({empty(x), empty(y), {}, r.weight, {empty(w)}});

    int dropped = fresh_symbol(t, Ns::label, t.name(Ns::label, r.label));
    rules.push_back({dropped, x, {r.rhs[d]}, 1, r.weight});
    steps.push_back({full(x), full(y), {{false, dropped}}, sr.one(), {empty(w)}});

    int switched = fresh_symbol(t, Ns::label, t.name(Ns::label, r.label));
    rules.push_back({switched, x, {other}, 1, r.weight});
    steps.push_back({full(x), empty(y), {{false, switched}, {true, kProductStart}}, sr.one(), {}});
  }

  ProductResult prod = walk_product(in.controller, walk, sr, cfg);
  out.controller = std::move(prod.controller);
  const Weight all_empty = prod.fresh_weight[empty(in.controllee.start)];
  if (!sr.is_zero(all_empty)) {
    int label = fresh_symbol(t, Ns::label, "empty");
    rules.push_back({label, in.controllee.start, {}, 0, sr.one()});
    out.controller.cfg.push_back({out.controller.start, {{false, label}}, all_empty});
  }
  out.controllee.ldcfg = std::move(rules);
  keep_used_labels(out);
  return out;
}

// Walk states (X, Y): the path sits at a node labeled X that, through
// unary rules already passed, now rewrites like Y. Unary steps become empty
// controller rules; every other rule for Y is copied with left-hand side X.
ControlPair unary_pass(const ControlPair& in, const Semiring& sr, const SolverConfig& cfg) {
  ControlPair out = in;
  SymbolTable& t = *out.controller.symbols;
  std::vector<int> xs = controllee_symbols(in.controllee);
  auto is_unary = [](const WldcfgProduction& r) {
    return r.rhs.size() == 1 && r.rhs[0].is_nt && r.distinguished_index == 1;
  };
  std::map<int, std::vector<int>> unary_next;
  for (const auto& r : in.controllee.ldcfg)
    if (is_unary(r)) unary_next[r.lhs].push_back(r.rhs[0].id);

  Walk walk;
  std::map<std::pair<int, int>, int> state;
  std::map<int, std::vector<int>> reached_from;  // y -> every x whose path reaches y
  for (int x : xs) {
    std::vector<int> stack{x};
    std::set<int> seen{x};
    while (!stack.empty()) {
      int y = stack.back();
      stack.pop_back();
      for (int z : unary_next[y])
        if (seen.insert(z).second) stack.push_back(z);
    }
    for (int y : seen) {
      state[{x, y}] = static_cast<int>(walk.state_names.size());
      walk.state_names.push_back(x == y ? t.name(Ns::controllee_nt, x)
                                        : t.name(Ns::controllee_nt, x) + "^" +
                                              t.name(Ns::controllee_nt, y));
      walk.summed.push_back(0);
      reached_from[y].push_back(x);
    }
    walk.starts.push_back(state.at({x, x}));
  }
  const int end = walk.end();

  std::vector<WldcfgProduction> rules;
  for (const auto& r : in.controllee.ldcfg) {
    auto& steps = walk.steps[r.label];
    for (int x : reached_from[r.lhs]) {
      const int from = state.at({x, r.lhs});
      if (is_unary(r)) {
        steps.push_back({from, state.at({x, r.rhs[0].id}), {}, r.weight, {}});
        continue;
      }
      WldcfgProduction copy = r;
      if (x != r.lhs) {
        copy.lhs = x;
        copy.label = fresh_symbol(t, Ns::label, t.name(Ns::label, r.label));
      }
      rules.push_back(copy);
      int to = end;
      if (r.distinguished_index > 0) {
        int y = r.rhs[r.distinguished_index - 1].id;
        to = state.at({y, y});
      }
      steps.push_back({from, to, {{false, copy.label}}, sr.one(), {}});
    }
  }

  ProductResult prod = walk_product(in.controller, walk, sr, cfg);
  out.controller = std::move(prod.controller);
  out.controllee.ldcfg = std::move(rules);
  keep_used_labels(out);
  return out;
}

}  // namespace

ControlPair binarize_controllee(const GrammarSpec& controllee, const GrammarSpec& controller,
                                const Semiring& sr) {
  require_pair(controller, controllee);
  ControlPair p = common_table(controller, controllee);
  SymbolTable& t = *p.controller.symbols;
  for (const auto& r : p.controllee.ldcfg) {
    if (r.rhs.size() > 2 && r.distinguished_index == 0)
      throw NotNormalForm({describe_ldcfg(p.controllee, r) +
                           "  (long rule without a distinguished symbol)"});
  }
  uniquify_labels(p.controller, p.controllee.ldcfg, sr);
  std::map<int, std::vector<Sym>> subst;
  std::vector<WldcfgProduction> rules;
  for (const auto& r : p.controllee.ldcfg) {
    std::vector<int> labels = chain(r, t, sr, rules);
    if (labels.size() > 1) {
      for (int l : labels) subst[r.label].push_back({false, l});
    }
  }
  p.controllee.ldcfg = std::move(rules);
  substitute(p.controller, subst);
  return p;
}

ControlPair root_foot_transform(const GrammarSpec& controller, const GrammarSpec& controllee,
                                const Semiring& sr) {
  require_pair(controller, controllee);
  ControlPair p = common_table(controller, controllee);
  SymbolTable& t = *p.controller.symbols;
  right_anchor(p.controller);
  binarize_in_place(p.controller, sr);
  std::vector<int> xs = controllee_symbols(p.controllee);
  std::map<int, int> index;
  Walk walk;
  for (int x : xs) {
    index[x] = static_cast<int>(walk.state_names.size());
    walk.state_names.push_back(t.name(Ns::controllee_nt, x));
    walk.summed.push_back(0);
    walk.starts.push_back(index[x]);
  }
  std::vector<WldcfgProduction> rules;
  for (const auto& r : p.controllee.ldcfg) {
    int foot = -1;
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
      if (r.distinguished_index == static_cast<int>(i) + 1) foot = r.rhs[i].id;
    }
    std::string name = t.name(Ns::label, r.label) + "{" + t.name(Ns::controllee_nt, r.lhs) + "|" +
                       (foot < 0 ? "$" : t.name(Ns::controllee_nt, foot)) + "}";
    WldcfgProduction copy = r;
    copy.label = fresh_symbol(t, Ns::label, name);
    rules.push_back(copy);
    walk.steps[r.label].push_back({index.at(r.lhs), foot < 0 ? walk.end() : index.at(foot),
                                   {{false, copy.label}}, sr.one(), {}});
  }
  ProductResult prod = walk_product(p.controller, walk, sr, SolverConfig{});
  p.controller = std::move(prod.controller);
  p.controllee.ldcfg = std::move(rules);
  keep_used_labels(p);
  return p;
}

ControlPair remove_nullary_controllee(const GrammarSpec& controller,
                                      const GrammarSpec& controllee, const Semiring& sr,
                                      const SolverConfig& cfg) {
  return nullary_pass(prepare_pair(controller, controllee, sr), sr, cfg);
}

ControlPair remove_unary_controllee(const GrammarSpec& controller,
                                    const GrammarSpec& controllee, const Semiring& sr,
                                    const SolverConfig& cfg) {
  return unary_pass(prepare_pair(controller, controllee, sr), sr, cfg);
}

namespace nf_detail {

ControlPair normalize_ldcfg_pair(const GrammarSpec& controller, const GrammarSpec& controllee,
                                 const Semiring& sr, const SolverConfig& cfg) {
  ControlPair p = nullary_pass(prepare_pair(controller, controllee, sr), sr, cfg);
  binarize_in_place(p.controller, sr);
  p = unary_pass(p, sr, cfg);
  cnf_in_place(p.controller, sr, cfg);
  auto& rules = p.controller.cfg;
  rules.erase(std::remove_if(rules.begin(), rules.end(),
                             [](const WcfgProduction& r) { return r.rhs.empty(); }),
              rules.end());
  keep_used_labels(p);
  return p;
}

}  // namespace nf_detail

}  // namespace tlw
