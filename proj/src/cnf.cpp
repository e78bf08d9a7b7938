#include <algorithm>
#include <map>
#include <set>

#include "nf_internal.hpp"
#include "tlw/errors.hpp"
#include "tlw/normal_forms.hpp"

namespace tlw {

namespace nf_detail {

SymbolTablePtr clone_table(const SymbolTablePtr& t) { return std::make_shared<SymbolTable>(*t); }

int fresh_symbol(SymbolTable& t, Ns ns, const std::string& base) {
  std::size_t k = base.find_first_not_of('%');
  return t.fresh(ns, k == std::string::npos ? "x" : base.substr(k));
}

std::vector<Weight> solve(const FixedPointSystem& sys, const SolverConfig& cfg,
                          const std::string& what) {
  FixedPointResult r = sys.solve(cfg);
  if (r.status != SolveStatus::converged)
    throw UnsupportedOperation(what + " did not converge within " +
                               std::to_string(cfg.max_sweeps) + " sweeps");
  return std::move(r.values);
}

void require_variant(const GrammarSpec& g, Variant v, const char* what) {
  if (g.variant != v) throw TypeError(std::string("expected ") + what + ", got " + to_string(g.variant));
  if (!g.symbols) throw TypeError(std::string(what) + " has no symbol table");
  ValidationReport rep = validate(g);
  if (!rep.ok()) throw LoadError(rep.errors());
}

void trim_wcfg(GrammarSpec& g, const Semiring& sr) {
  using Key = std::pair<int, std::vector<std::pair<bool, int>>>;
  std::map<Key, std::size_t> index;
  std::vector<WcfgProduction> merged;
  for (const auto& p : g.cfg) {
    if (sr.is_zero(p.weight)) continue;
    Key k{p.lhs, {}};
    for (const Sym& s : p.rhs) k.second.emplace_back(s.is_nt, s.id);
    auto [it, fresh] = index.emplace(std::move(k), merged.size());
    if (fresh)
      merged.push_back(p);
    else
      merged[it->second].weight = sr.plus(merged[it->second].weight, p.weight);
  }

  const int n = g.symbols->size(g.nt_ns());
  std::vector<char> productive(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : merged) {
      if (productive[p.lhs]) continue;
      bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                            [&](const Sym& s) { return !s.is_nt || productive[s.id]; });
      if (ok) productive[p.lhs] = changed = true;
    }
  }
  std::vector<std::vector<std::size_t>> by_lhs(n);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const auto& p = merged[i];
    bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                          [&](const Sym& s) { return !s.is_nt || productive[s.id]; });
    if (ok) by_lhs[p.lhs].push_back(i);
  }
  std::vector<char> reached(n, 0);
  std::vector<int> stack{g.start};
  reached[g.start] = 1;
  std::vector<WcfgProduction> out;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (std::size_t i : by_lhs[x]) {
      out.push_back(merged[i]);
      for (const Sym& s : merged[i].rhs) {
        if (s.is_nt && !reached[s.id]) {
          reached[s.id] = 1;
          stack.push_back(s.id);
        }
      }
    }
  }
  g.cfg = std::move(out);
}

void binarize_in_place(GrammarSpec& g, const Semiring& sr) {
  SymbolTable& t = *g.symbols;
  const Ns nts = g.nt_ns();
  std::vector<WcfgProduction> out;
  for (const auto& p : g.cfg) {
    if (p.rhs.size() <= 2) {
      out.push_back(p);
      continue;
    }
    int lhs = p.lhs;
    Weight w = p.weight;
    for (std::size_t i = 0; i + 2 < p.rhs.size(); ++i) {
      int rest = fresh_symbol(t, nts, t.name(nts, p.lhs) + "_r");
      out.push_back({lhs, {p.rhs[i], {true, rest}}, w});
      lhs = rest;
      w = sr.one();
    }
    out.push_back({lhs, {p.rhs[p.rhs.size() - 2], p.rhs.back()}, w});
  }
  g.cfg = std::move(out);
}

}  // namespace nf_detail

using namespace nf_detail;

namespace {

std::set<int> grammar_nonterminals(const GrammarSpec& g) {
  std::set<int> out{g.start};
  for (const auto& p : g.cfg) {
    out.insert(p.lhs);
    for (const Sym& s : p.rhs)
      if (s.is_nt) out.insert(s.id);
  }
  return out;
}

}  // namespace

std::vector<Weight> nullary_weights_wcfg(const GrammarSpec& g, const Semiring& sr,
                                         const SolverConfig& cfg) {
  require_variant(g, Variant::wcfg, "a WCFG");
  const int n = g.symbols->size(g.nt_ns());
  FixedPointSystem sys(sr);
  for (int i = 0; i < n; ++i) sys.add_variable();
  for (const auto& p : g.cfg) {
    std::vector<int> factors;
    bool all_nt = true;
    for (const Sym& s : p.rhs) {
      if (!s.is_nt) {
        all_nt = false;
        break;
      }
      factors.push_back(s.id);
    }
    if (all_nt) sys.add_term(p.lhs, p.weight, std::move(factors));
  }
  return solve(sys, cfg, "nullable weights");
}

std::map<std::pair<int, int>, Weight> unary_chain_weights_wcfg(const GrammarSpec& g,
                                                               const Semiring& sr,
                                                               const SolverConfig& cfg) {
  require_variant(g, Variant::wcfg, "a WCFG");
  std::set<int> nts = grammar_nonterminals(g);
  // into[y] lists the unary rules x -> y.
  std::map<int, std::vector<std::pair<int, Weight>>> into;
  for (const auto& p : g.cfg) {
    if (p.rhs.size() == 1 && p.rhs[0].is_nt) into[p.rhs[0].id].emplace_back(p.lhs, p.weight);
  }

  FixedPointSystem sys(sr);
  std::map<std::pair<int, int>, int> var;
  for (int y : nts) {
    // Everything that reaches y through unary rules.
    std::vector<int> stack{y};
    std::set<int> seen{y};
    while (!stack.empty()) {
      int z = stack.back();
      stack.pop_back();
      auto it = into.find(z);
      if (it == into.end()) continue;
      for (const auto& [x, w] : it->second) {
        if (seen.insert(x).second) stack.push_back(x);
      }
    }
    for (int x : seen) var[{x, y}] = sys.add_variable();
  }
  for (const auto& [xy, v] : var) {
    if (xy.first == xy.second) sys.add_term(v, sr.one(), {});
  }
  std::map<int, std::vector<std::pair<int, int>>> targets;  // x -> (y, var of (x, y))
  for (const auto& [xy, v] : var) targets[xy.first].emplace_back(xy.second, v);
  for (const auto& p : g.cfg) {
    if (p.rhs.size() != 1 || !p.rhs[0].is_nt) continue;
    for (const auto& [y, v] : targets[p.lhs]) {
      auto via = var.find({p.rhs[0].id, y});
      if (via != var.end()) sys.add_term(v, p.weight, {via->second});
    }
  }
  std::vector<Weight> values = solve(sys, cfg, "unary chain weights");
  std::map<std::pair<int, int>, Weight> out;
  for (const auto& [xy, v] : var) {
    if (xy.first == xy.second || !sr.is_zero(values[v])) out.emplace(xy, values[v]);
  }
  return out;
}

bool is_cnf(const GrammarSpec& g, std::vector<std::string>* why) {
  if (g.variant != Variant::wcfg) {
    if (why) why->push_back("not a WCFG");
    return false;
  }
  bool ok = true;
  auto bad = [&](const WcfgProduction& p, const char* reason) {
    ok = false;
    if (why) why->push_back(describe_cfg(g, p) + "  (" + reason + ")");
  };
  for (const auto& p : g.cfg) {
    if (p.rhs.empty()) {
      if (p.lhs != g.start) bad(p, "empty rule for a non-start symbol");
    } else if (p.rhs.size() == 1) {
      if (p.rhs[0].is_nt) bad(p, "unary rule");
    } else if (p.rhs.size() == 2) {
      if (!p.rhs[0].is_nt || !p.rhs[1].is_nt)
        bad(p, "terminal in a binary rule");
      else if (p.rhs[0].id == g.start || p.rhs[1].id == g.start)
        bad(p, "start symbol on a right-hand side");
    } else {
      bad(p, "right-hand side longer than two");
    }
  }
  return ok;
}

GrammarSpec binarize_wcfg(const GrammarSpec& g, const Semiring& sr) {
  require_variant(g, Variant::wcfg, "a WCFG");
  GrammarSpec h = g;
  h.symbols = clone_table(g.symbols);
  binarize_in_place(h, sr);
  return h;
}

void nf_detail::cnf_in_place(GrammarSpec& h, const Semiring& sr, const SolverConfig& cfg) {
  SymbolTable& t = *h.symbols;
  const Ns nts = h.nt_ns();
  const Ns terms = h.term_ns();

  int start = fresh_symbol(t, nts, t.name(nts, h.start));
  h.cfg.insert(h.cfg.begin(), WcfgProduction{start, {{true, h.start}}, sr.one()});
  h.start = start;

  std::map<int, int> pre_terminal;
  std::vector<WcfgProduction> extra;
  for (auto& p : h.cfg) {
    if (p.rhs.size() < 2) continue;
    for (Sym& s : p.rhs) {
      if (s.is_nt) continue;
      auto [it, fresh] = pre_terminal.emplace(s.id, -1);
      if (fresh) {
        it->second = fresh_symbol(t, nts, "T_" + t.name(terms, s.id));
        extra.push_back({it->second, {s}, sr.one()});
      }
      s = {true, it->second};
    }
  }
  h.cfg.insert(h.cfg.end(), extra.begin(), extra.end());
  binarize_in_place(h, sr);

  std::vector<Weight> nullable = nullary_weights_wcfg(h, sr, cfg);
  std::vector<WcfgProduction> no_empty;
  for (const auto& p : h.cfg) {
    if (p.rhs.empty()) continue;
    no_empty.push_back(p);
    if (p.rhs.size() == 2) {
      Weight drop_right = sr.times(p.weight, nullable[p.rhs[1].id]);
      Weight drop_left = sr.times(p.weight, nullable[p.rhs[0].id]);
      if (!sr.is_zero(drop_right)) no_empty.push_back({p.lhs, {p.rhs[0]}, drop_right});
      if (!sr.is_zero(drop_left)) no_empty.push_back({p.lhs, {p.rhs[1]}, drop_left});
    }
  }

  GrammarSpec tmp = h;
  tmp.cfg = no_empty;
  auto chains = unary_chain_weights_wcfg(tmp, sr, cfg);
  std::map<int, std::vector<std::pair<int, Weight>>> reaching;  // y -> (x, x =>* y)
  for (const auto& [xy, w] : chains) reaching[xy.second].emplace_back(xy.first, w);

  std::vector<WcfgProduction> out;
  for (const auto& p : no_empty) {
    if (p.rhs.size() == 1 && p.rhs[0].is_nt) continue;
    auto it = reaching.find(p.lhs);
    if (it == reaching.end()) {
      out.push_back(p);
      continue;
    }
    for (const auto& [x, w] : it->second) out.push_back({x, p.rhs, sr.times(w, p.weight)});
  }
  if (!sr.is_zero(nullable[start])) out.push_back({start, {}, nullable[start]});
  h.cfg = std::move(out);
  trim_wcfg(h, sr);
}

GrammarSpec cnf_convert_wcfg(const GrammarSpec& g, const Semiring& sr, const SolverConfig& cfg) {
  require_variant(g, Variant::wcfg, "a WCFG");
  GrammarSpec h = g;
  h.symbols = clone_table(g.symbols);
  cnf_in_place(h, sr, cfg);
  return h;
}

}  // namespace tlw
