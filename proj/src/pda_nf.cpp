#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "nf_internal.hpp"
#include "tlw/errors.hpp"
#include "tlw/normal_forms.hpp"

namespace tlw {

using namespace nf_detail;

namespace {

std::string describe_pda(const GrammarSpec& p, const WpdaTransition& t) {
  const SymbolTable& s = *p.symbols;
  std::string out = s.name(p.state_ns(), t.from) + ", ";
  for (int x : t.pop) out += s.name(p.nt_ns(), x) + " ";
  out += "-";
  if (t.scan >= 0) out += s.name(p.term_ns(), t.scan);
  out += "-> " + s.name(p.state_ns(), t.to) + ",";
  for (int x : t.push) out += " " + s.name(p.nt_ns(), x);
  return out;
}

std::string describe_ldpda(const GrammarSpec& p, const WldpdaTransition& t) {
  const SymbolTable& s = *p.symbols;
  std::string out = s.name(Ns::label, t.label) + " : " + s.name(p.state_ns(), t.from) + ", " +
                    s.name(p.nt_ns(), t.pop) + " -";
  if (t.scan >= 0) out += s.name(Ns::terminal, t.scan);
  out += "-> " + s.name(p.state_ns(), t.to) + ",";
  for (std::size_t i = 0; i < t.push.size(); ++i) {
    out += " ";
    if (static_cast<int>(i) + 1 == t.distinguished_index) out += "*";
    out += s.name(p.nt_ns(), t.push[i]);
  }
  return out;
}

// Grammar of accepting runs. [q, X, r] derives the label sequences of runs
// that start in q with X on top and end in r with X popped; the ^L copies
// only those whose last transition scans.
class RunGrammar {
 public:
  RunGrammar(const GrammarSpec& p, const Semiring& sr) : p_(p), sr_(sr), t_(*p.symbols) {
    for (const auto& tr : p.pda) by_top_[{tr.from, tr.pop.at(0)}].push_back(&tr);
    n_states_ = t_.size(p.state_ns());
  }

  GrammarSpec run() {
    GrammarSpec g;
    g.variant = Variant::wcfg;
    g.role = p_.role;
    g.symbols = p_.symbols;
    g.terminals_are_labels = p_.terminals_are_labels;
    g.declared_terminals = p_.declared_terminals;
    g.start = symbol(p_.init_state, p_.start, p_.final_state, true);
    for (std::size_t i = 0; i < queue_.size(); ++i) expand(queue_[i], g.cfg);
    trim_wcfg(g, sr_);
    return g;
  }

 private:
  using Key = std::tuple<int, int, int, bool>;

  int symbol(int q, int x, int r, bool last) {
    Key k{q, x, r, last};
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    const Ns nts = p_.nt_ns();
    std::string name = t_.name(nts, x) + "{" + t_.name(p_.state_ns(), q) + "|" +
                       t_.name(p_.state_ns(), r) + "}" + (last ? "^L" : "");
    int id = fresh_symbol(t_, nts, name);
    ids_.emplace(k, id);
    queue_.push_back(k);
    return id;
  }

  void expand(const Key& k, std::vector<WcfgProduction>& out) {
    auto [q, x, r, last] = k;
    const int id = ids_.at(k);
    auto it = by_top_.find({q, x});
    if (it == by_top_.end()) return;
    for (const WpdaTransition* tr : it->second) {
      std::vector<Sym> head;
      if (tr->scan >= 0) head.push_back({false, tr->scan});
      const int n = static_cast<int>(tr->push.size());
      if (n == 0) {
        if (tr->to == r && (!last || tr->scan >= 0)) out.push_back({id, head, tr->weight});
        continue;
      }
      // Intermediate states between the pushed symbols.
      std::vector<int> mid(n - 1, 0);
      while (true) {
        std::vector<Sym> rhs = head;
        int from = tr->to;
        for (int i = 0; i < n; ++i) {
          const bool tail = i == n - 1;
          int to = tail ? r : mid[i];
          rhs.push_back({true, symbol(from, tr->push[i], to, tail && last)});
          from = to;
        }
        out.push_back({id, std::move(rhs), tr->weight});
        int i = 0;
        while (i < n - 1 && ++mid[i] == n_states_) mid[i++] = 0;
        if (i == n - 1) break;
      }
    }
  }

  const GrammarSpec& p_;
  Semiring sr_;
  SymbolTable& t_;
  int n_states_ = 0;
  std::map<std::pair<int, int>, std::vector<const WpdaTransition*>> by_top_;
  std::map<Key, int> ids_;
  std::vector<Key> queue_;
};

}  // namespace

GrammarSpec nf_detail::wpda_to_wcfg_in_place(const GrammarSpec& p, const Semiring& sr) {
  return RunGrammar(p, sr).run();
}

GrammarSpec wpda_to_wcfg(const GrammarSpec& p, const Semiring& sr) {
  require_variant(p, Variant::wpda, "a WPDA");
  GrammarSpec q = p;
  q.symbols = clone_table(p.symbols);
  return wpda_to_wcfg_in_place(q, sr);
}

GrammarSpec cnf_to_wpda(const GrammarSpec& g, const Semiring& sr) {
  require_variant(g, Variant::wcfg, "a WCFG");
  std::vector<std::string> why;
  if (!is_cnf(g, &why)) throw NotNormalForm(why);
  GrammarSpec p = g;
  p.variant = Variant::wpda;
  p.symbols = clone_table(g.symbols);
  p.cfg.clear();
  const int q = fresh_symbol(*p.symbols, p.state_ns(), "q");
  p.init_state = p.final_state = q;
  for (const auto& r : g.cfg) {
    if (r.rhs.empty()) continue;
    WpdaTransition t;
    t.from = t.to = q;
    t.pop = {r.lhs};
    t.weight = r.weight;
    if (r.rhs.size() == 1)
      t.scan = r.rhs[0].id;
    else
      t.push = {r.rhs[0].id, r.rhs[1].id};
    p.pda.push_back(std::move(t));
  }
  (void)sr;
  return p;
}

PreparedWpda prepare_wpda(const GrammarSpec& p, const Semiring& sr, bool strict) {
  require_variant(p, Variant::wpda, "a WPDA");
  PreparedWpda out;
  out.pda = p;
  out.pda.symbols = clone_table(p.symbols);
  out.pda.pda.clear();
  SymbolTable& t = *out.pda.symbols;
  const Ns nts = p.nt_ns();
  const Ns states = p.state_ns();

  std::map<int, int> pre_terminal;
  std::set<std::pair<int, int>> scanners;  // (state, terminal) pairs already emitted
  std::vector<WpdaTransition> scanned;
  for (WpdaTransition tr : p.pda) {
    if (tr.scan >= 0 && !tr.push.empty()) {
      auto [it, fresh] = pre_terminal.emplace(tr.scan, -1);
      if (fresh) it->second = fresh_symbol(t, nts, "T_" + t.name(p.term_ns(), tr.scan));
      if (scanners.insert({tr.to, tr.scan}).second)
        scanned.push_back({tr.to, {it->second}, tr.scan, tr.to, {}, sr.one()});
      tr.push.insert(tr.push.begin(), it->second);
      tr.scan = -1;
    }
    scanned.push_back(std::move(tr));
  }

  for (const WpdaTransition& tr : scanned) {
    const int k = static_cast<int>(tr.push.size());
    if (k <= 2) {
      out.pda.pda.push_back(tr);
      continue;
    }
    // Pushes Y1..Yk (Y1 on top) as [W1 Yk], then W1 -> [W2 Yk-1], ...,
    // finally W(k-2) -> [Y1 Y2].
    int from = tr.from;
    int top = tr.pop[0];
    Weight w = tr.weight;
    for (int i = k - 1; i >= 2; --i) {
      int state = fresh_symbol(t, states, t.name(states, tr.from) + "_s");
      int rest = fresh_symbol(t, nts, t.name(nts, tr.pop[0]) + "_w");
      out.pda.pda.push_back({from, {top}, -1, state, {rest, tr.push[i]}, w});
      from = state;
      top = rest;
      w = sr.one();
    }
    out.pda.pda.push_back({from, {top}, -1, tr.to, {tr.push[0], tr.push[1]}, w});
  }

  for (const auto& tr : out.pda.pda) {
    if (tr.scan >= 0 || tr.push.size() == 2) continue;
    bool final_empty = tr.push.empty() && tr.from == out.pda.init_state &&
                       tr.to == out.pda.final_state && tr.pop[0] == out.pda.start;
    if (!final_empty) out.residue.push_back(describe_pda(out.pda, tr));
  }
  if (strict && !out.residue.empty()) throw NotNormalForm(out.residue);
  return out;
}

ControlPair normalize_ldpda_controllee(const GrammarSpec& controller,
                                       const GrammarSpec& controllee, const Semiring& sr) {
  require_variant(controllee, Variant::wldpda, "a WLD-PDA controllee");
  SymbolTablePtr table = clone_table(controllee.symbols);
  ControlPair p{rebase(controller, table), controllee};
  p.controllee.symbols = table;
  if (p.controller.variant == Variant::wpda) {
    p.controller = wpda_to_wcfg_in_place(p.controller, sr);
  } else {
    require_variant(controller, Variant::wcfg, "a WCFG or WPDA controller");
  }
  GrammarSpec& cte = p.controllee;
  SymbolTable& t = *table;
  const Ns nts = cte.nt_ns();
  const int n_states = t.size(cte.state_ns());

  // A start symbol that is also pushed gets a fresh copy for the root.
  bool start_pushed = std::any_of(cte.ldpda.begin(), cte.ldpda.end(), [&](const WldpdaTransition& tr) {
    return std::count(tr.push.begin(), tr.push.end(), cte.start) > 0;
  });
  if (start_pushed) {
    const int root = fresh_symbol(t, nts, t.name(nts, cte.start));
    std::vector<WldpdaTransition> copies;
    for (const auto& tr : cte.ldpda) {
      if (tr.pop != cte.start) continue;
      copies.push_back(tr);
      copies.back().pop = root;
    }
    cte.ldpda.insert(cte.ldpda.end(), copies.begin(), copies.end());
    cte.start = root;
  }

  std::vector<std::string> bad;
  auto long_dist = [](const WldpdaTransition& tr) {
    return tr.scan < 0 && tr.distinguished_index > 0 && tr.push.size() > 2;
  };
  for (const auto& tr : cte.ldpda) {
    const int k = static_cast<int>(tr.push.size());
    bool ok = false;
    if (tr.scan >= 0)
      ok = k == 0 && tr.distinguished_index == 0;
    else if (tr.distinguished_index > 0)
      ok = k >= 2;
    else
      ok = k == 0 && tr.pop == cte.start && tr.from == cte.init_state &&
           tr.to == cte.final_state;
    if (ok && std::count(tr.push.begin(), tr.push.end(), cte.start) > 0) ok = false;
    if (!ok) bad.push_back(describe_ldpda(cte, tr));
  }
  if (!bad.empty()) throw NotNormalForm(bad);
  if (std::none_of(cte.ldpda.begin(), cte.ldpda.end(), long_dist)) return p;

  uniquify_labels(p.controller, cte.ldpda, sr);
  std::map<int, std::vector<Sym>> subst;
  std::vector<WldpdaTransition> out;
  for (const auto& tr : cte.ldpda) {
    if (!long_dist(tr)) {
      out.push_back(tr);
      continue;
    }
    std::vector<int> left(tr.push.begin(), tr.push.begin() + tr.distinguished_index - 1);
    std::vector<int> right(tr.push.begin() + tr.distinguished_index, tr.push.end());
    const int core = tr.push[tr.distinguished_index - 1];
    std::vector<Sym>& labels = subst[tr.label];
    // The remaining push starts in `from`; once a left unit has been peeled
    // the state is unknown, so links are copied for every state.
    std::vector<int> froms{tr.from};
    int top = tr.pop;
    int to = tr.to;
    int label = tr.label;
    Weight w = tr.weight;
    std::size_t li = 0;
    while ((left.size() - li) + right.size() > 1) {
      int rest = fresh_symbol(t, nts, t.name(nts, tr.pop) + "_c");
      for (int from : froms) {
        WldpdaTransition link{label, from, top, -1, froms.size() > 1 ? from : to, {}, 0, w};
        if (li < left.size()) {
          link.push = {left[li], rest};
          link.distinguished_index = 2;
        } else {
          link.push = {rest, right.back()};
          link.distinguished_index = 1;
        }
        out.push_back(link);
      }
      labels.push_back({false, label});
      if (li < left.size()) {
        ++li;
        froms.clear();
        for (int s = 0; s < n_states; ++s) froms.push_back(s);
      } else {
        right.pop_back();
        if (froms.size() == 1) froms = {to};
      }
      top = rest;
      label = fresh_symbol(t, Ns::label, t.name(Ns::label, tr.label));
      w = sr.one();
    }
    for (int from : froms) {
      WldpdaTransition link{label, from, top, -1, froms.size() > 1 ? from : to, {}, 0, w};
      if (li < left.size()) {
        link.push = {left[li], core};
        link.distinguished_index = 2;
      } else {
        link.push = {core, right.front()};
        link.distinguished_index = 1;
      }
      out.push_back(link);
    }
    labels.push_back({false, label});
  }
  cte.ldpda = std::move(out);
  substitute(p.controller, subst);
  return p;
}

}  // namespace tlw
