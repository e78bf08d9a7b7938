#include "tlw/allsum.hpp"

#include <deque>
#include <functional>
#include <unordered_map>

#include "tlw/errors.hpp"

namespace tlw {

namespace {

struct ItemHash {
  std::size_t operator()(const AllsumItem& it) const {
    std::size_t h = it.gapped ? 0x9e3779b97f4a7c15ULL : 0;
    for (int v : {it.x, it.a, it.y, it.p, it.s, it.q, it.r, it.e, it.f})
      h = (h ^ static_cast<std::size_t>(v + 1)) * 0x100000001b3ULL;
    return h;
  }
};

AllsumItem ungapped(int p, int x, int s, int a, int e) {
  AllsumItem it;
  it.x = x; it.a = a; it.p = p; it.s = s; it.e = e;
  return it;
}

AllsumItem gapped(int p, int x, int a, int s, int q, int y, int r, int e, int f) {
  AllsumItem it;
  it.gapped = true;
  it.x = x; it.a = a; it.y = y; it.p = p; it.s = s; it.q = q; it.r = r; it.e = e; it.f = f;
  return it;
}

// Top-down generation of the equation system: every item the roots depend
// on gets one term per way a rule can build it.
class Builder {
 public:
  Builder(const TwoLevelGrammar& g, const Semiring& sr) : g_(g), sr_(sr) {
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
      const auto& r = g.rules[i];
      by_head_[head_key(r.lhs, r.pop, r.from_state, r.ctl_from)].push_back(static_cast<int>(i));
    }
    n_nt_ = g.n_nonterminals();
  }

  int intern(const AllsumItem& it) {
    auto [pos, fresh] = ids_.emplace(it, static_cast<int>(items_.size()));
    if (fresh) {
      items_.push_back(it);
      terms_.emplace_back();
      work_.push_back(pos->second);
    }
    return pos->second;
  }

  void close() {
    while (!work_.empty()) {
      int id = work_.front();
      work_.pop_front();
      expand(id);
    }
  }

  struct Term {
    Weight coef;
    std::vector<int> factors;
  };

  const std::vector<AllsumItem>& items() const { return items_; }
  const std::vector<std::vector<Term>>& terms() const { return terms_; }

 private:
  using Factors = std::vector<AllsumItem>;
  using Next = std::function<void(int state, Factors&)>;

  std::uint64_t head_key(int x, int a, int p, int e) const {
    return ((static_cast<std::uint64_t>(x) * 1000003u + static_cast<std::uint64_t>(a)) * 1009u +
            static_cast<std::uint64_t>(p)) * 1009u + static_cast<std::uint64_t>(e);
  }

  void emit(int target, const Weight& w, const Factors& fs) {
    std::vector<int> ids;
    ids.reserve(fs.size());
    for (const auto& f : fs) ids.push_back(intern(f));
    terms_[target].push_back({w, std::move(ids)});
  }

  // Runs the units [from, to) of `rhs` as fresh constituents, starting in
  // controllee state `state`; calls `k` with the state reached.
  void fresh_run(const std::vector<Unit>& rhs, std::size_t from, std::size_t to, int state,
                 Factors& fs, const Next& k) {
    if (from == to) {
      k(state, fs);
      return;
    }
    const Unit& u = rhs[from];
    if (u.terminal) {
      fresh_run(rhs, from + 1, to, state, fs, k);
      return;
    }
    for (int t = 0; t < g_.n_states; ++t) {
      fs.push_back(ungapped(state, u.sym, t, g_.ctl_start, g_.ctl_init));
      fresh_run(rhs, from + 1, to, t, fs, k);
      fs.pop_back();
    }
  }

  // Pops push[idx..] from the distinguished descendant `y` (entered in state
  // `state` with controller state `e`). For an ungapped target the last
  // symbol is popped by an ungapped item; for a gapped target the chain
  // ends at the target's gap.
  void pop_chain(const std::vector<int>& push, std::size_t idx, int y, int state, int e,
                 const AllsumItem& target, int exit_state, Factors& fs, const Next& k) {
    const bool last = idx + 1 == push.size();
    const int a = push[idx];
    if (last && !target.gapped) {
      fs.push_back(ungapped(state, y, exit_state, a, e));
      k(exit_state, fs);
      fs.pop_back();
      return;
    }
    if (last) {
      fs.push_back(gapped(state, y, a, exit_state, target.q, target.y, target.r, e, target.f));
      k(exit_state, fs);
      fs.pop_back();
      return;
    }
    for (int y2 = 0; y2 < n_nt_; ++y2)
      for (int j = 0; j < g_.n_states; ++j)
        for (int kk = 0; kk < g_.n_states; ++kk)
          for (int f = 0; f < g_.n_ctl_states; ++f) {
            fs.push_back(gapped(state, y, a, exit_state, j, y2, kk, e, f));
            pop_chain(push, idx + 1, y2, j, f, target, kk, fs, k);
            fs.pop_back();
          }
  }

  void expand(int id) {
    const AllsumItem it = items_[id];
    auto found = by_head_.find(head_key(it.x, it.a, it.p, it.e));
    if (found == by_head_.end()) return;
    for (int ri : found->second) {
      const TwoLevelRule& r = g_.rules[ri];
      if (sr_.is_zero(r.weight)) continue;
      Factors fs;
      if (r.dist < 0) {
        if (it.gapped || !r.push.empty() || r.ctl_to != g_.ctl_final) continue;
        fresh_run(r.rhs, 0, r.rhs.size(), r.to_state, fs, [&](int end, Factors& f) {
          if (end == it.s) emit(id, r.weight, f);
        });
        continue;
      }
      const std::size_t d = static_cast<std::size_t>(r.dist);
      const int yd = r.rhs[d].sym;
      fresh_run(r.rhs, 0, d, r.to_state, fs, [&](int t1, Factors& f1) {
        auto suffix = [&](int t2, Factors& f2) {
          fresh_run(r.rhs, d + 1, r.rhs.size(), t2, f2, [&](int end, Factors& f3) {
            if (end == it.s) emit(id, r.weight, f3);
          });
        };
        if (r.push.empty()) {
          // The distinguished child is the gap itself.
          if (!it.gapped || yd != it.y || t1 != it.q || r.ctl_to != it.f) return;
          suffix(it.r, f1);
          return;
        }
        // The distinguished child returns in some state t2 before the suffix.
        for (int t2 = 0; t2 < g_.n_states; ++t2)
          pop_chain(r.push, 0, yd, t1, r.ctl_to, it, t2, f1,
                    [&](int exit, Factors& f2) { suffix(exit, f2); });
      });
    }
  }

  const TwoLevelGrammar& g_;
  const Semiring& sr_;
  int n_nt_ = 0;
  std::unordered_map<std::uint64_t, std::vector<int>> by_head_;
  std::unordered_map<AllsumItem, int, ItemHash> ids_;
  std::vector<AllsumItem> items_;
  std::vector<std::vector<Term>> terms_;
  std::deque<int> work_;
};

// Items that have at least one finite derivation.
std::vector<char> derivable(const Builder& b) {
  const auto& terms = b.terms();
  std::vector<char> ok(terms.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < terms.size(); ++v) {
      if (ok[v]) continue;
      for (const auto& t : terms[v]) {
        bool all = true;
        for (int f : t.factors) all = all && ok[f];
        if (all) {
          ok[v] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  return ok;
}

}  // namespace

std::string describe_item(const TwoLevelGrammar& g, const AllsumItem& it) {
  const SymbolTable& t = *g.symbols;
  const bool es = controllee_is_pda(g.formalism);
  const bool cs = controller_is_pda(g.formalism);
  auto st = [&](int q) { return es ? t.name(Ns::controllee_state, q) + " " : std::string(); };
  auto cst = [&](int e) { return cs ? "(" + t.name(Ns::controller_state, e) + ")" : std::string(); };
  std::string s = "<" + st(it.p) + t.name(Ns::controllee_nt, it.x) + " " +
                  t.name(Ns::controller_nt, it.a);
  if (es) s += " " + t.name(Ns::controllee_state, it.s);
  if (it.gapped) {
    s += " | " + st(it.q) + t.name(Ns::controllee_nt, it.y);
    if (es) s += " " + t.name(Ns::controllee_state, it.r);
  }
  s += ">" + cst(it.e);
  if (it.gapped) s += cst(it.f);
  return s;
}

AllsumResult allsum_items(const TwoLevelGrammar& g, const Semiring& sr, const AllsumOptions& opt) {
  if (!sr.is_omega_continuous() && !sr.is_idempotent())
    throw UnsupportedOperation("allsum needs an omega-continuous or idempotent semiring");
  for (const auto& r : g.rules) sr.check(r.weight);

  Builder b(g, sr);
  const AllsumItem goal = ungapped(g.init_state, g.start, g.final_state, g.ctl_start, g.ctl_init);
  b.intern(goal);
  if (opt.all_items) {
    const int nx = g.n_nonterminals(), na = g.n_ctl_symbols();
    const int nq = g.n_states, ne = g.n_ctl_states;
    for (int x = 0; x < nx; ++x)
      for (int a = 0; a < na; ++a)
        for (int p = 0; p < nq; ++p)
          for (int s = 0; s < nq; ++s)
            for (int e = 0; e < ne; ++e) {
              b.intern(ungapped(p, x, s, a, e));
              for (int y = 0; y < nx; ++y)
                for (int q = 0; q < nq; ++q)
                  for (int r = 0; r < nq; ++r)
                    for (int f = 0; f < ne; ++f) b.intern(gapped(p, x, a, s, q, y, r, e, f));
            }
  }
  b.close();

  const std::vector<char> ok = derivable(b);
  const auto& items = b.items();
  std::vector<int> var(items.size(), -1);
  FixedPointSystem sys(sr);
  for (std::size_t i = 0; i < items.size(); ++i)
    if (ok[i]) var[i] = sys.add_variable();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ok[i]) continue;
    for (const auto& t : b.terms()[i]) {
      std::vector<int> fs;
      bool usable = true;
      for (int f : t.factors) {
        if (var[f] < 0) {
          usable = false;
          break;
        }
        fs.push_back(var[f]);
      }
      if (usable) sys.add_term(var[i], t.coef, std::move(fs));
    }
  }

  AllsumResult res;
  res.items = sys.size();
  res.terms = sys.term_count();
  FixedPointResult fp = sys.solve(opt.solver);
  res.sweeps = fp.sweeps;
  res.monotonicity_violations = fp.monotonicity_violations;
  res.status = fp.status;
  res.value = var[0] >= 0 ? fp.values[var[0]] : sr.zero();
  if (sr.is_infinite(res.value)) res.status = SolveStatus::diverged;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (var[i] >= 0) res.item_values.push_back({items[i], fp.values[var[i]]});
  return res;
}

AllsumResult allsum(const TwoLevelGrammar& g, const Semiring& sr, const AllsumOptions& opt) {
  return allsum_items(g, sr, opt);
}

AllsumResult allsum(const TwoLevelNF& g, const Semiring& sr, const AllsumOptions& opt) {
  return allsum_items(g.grammar(), sr, opt);
}

}  // namespace tlw
