#include "tlw/oracle.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <functional>
#include <string>
#include <unordered_map>

#include "tlw/errors.hpp"

namespace tlw {

namespace {

constexpr int kBottom = -2;  // sentinel controller symbol below a pop computation
constexpr int kUnreachable = INT_MAX / 4;
constexpr std::size_t kDefaultNodeCap = 5'000'000;

std::size_t node_cap_from_env(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TLW_NODE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultNodeCap;
}

bool looks_normal(const TwoLevelGrammar& g) {
  try {
    classify_nf(g);
    return true;
  } catch (const NotNormalForm&) {
    return false;
  }
}

// One element of the sentential form: a terminal, or a controllee
// nonterminal with its controller state and stack (top at the back).
struct Entry {
  bool terminal = false;
  int sym = 0;
  int ctl_state = 0;
  std::vector<int> ctl;
};

struct Gap {
  bool seen = false;
  int j = -1, k = -1, q = -1, r = -1, y = -1, f = -1;
};

struct Config {
  int state = 0;
  std::vector<int> emitted;
  std::vector<Entry> stack;  // leftmost element at the back
  Gap gap;
};

class Search {
 public:
  Search(const TwoLevelGrammar& g, const Semiring& sr, int limit, int max_steps,
         std::size_t cap, bool nf)
      : g_(g), sr_(sr), limit_(limit), max_steps_(max_steps), cap_(cap), nf_(nf) {
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
      const auto& r = g.rules[i];
      if (sr.is_zero(r.weight)) continue;
      index_[key(r.lhs, r.pop, r.from_state, r.ctl_from)].push_back(static_cast<int>(i));
    }
    compute_minlen();
  }

  const std::vector<int>* target = nullptr;
  bool record = false;
  // Called for every finished configuration.
  std::function<void(const Config&, const Weight&, const std::vector<int>&)> on_done;

  bool step_cut = false;
  std::size_t nodes = 0;

  void run(Config c) {
    std::vector<int> path;
    dfs(std::move(c), 0, sr_.one(), path);
  }

 private:
  static std::uint64_t key(int x, int a, int p, int e) {
    return ((static_cast<std::uint64_t>(x) * 1000003u + static_cast<std::uint64_t>(a)) * 1009u +
            static_cast<std::uint64_t>(p)) * 1009u + static_cast<std::uint64_t>(e);
  }

  void compute_minlen() {
    minlen_.assign(g_.n_nonterminals(), kUnreachable);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : g_.rules) {
        if (sr_.is_zero(r.weight)) continue;
        long len = r.scan >= 0 ? 1 : 0;
        for (const Unit& u : r.rhs) len += u.terminal ? 1 : minlen_[u.sym];
        if (len < minlen_[r.lhs]) {
          minlen_[r.lhs] = static_cast<int>(len);
          changed = true;
        }
      }
    }
  }

  bool emit(Config& c, int a) {
    if (target) {
      std::size_t pos = c.emitted.size();
      if (pos >= target->size() || (*target)[pos] != a) return false;
    }
    c.emitted.push_back(a);
    return static_cast<int>(c.emitted.size()) <= limit_;
  }

  // Emits leading terminals and opens the gap when the sentinel surfaces.
  // Returns false if the configuration is dead.
  bool settle(Config& c) {
    while (!c.stack.empty() && c.stack.back().terminal) {
      int a = c.stack.back().sym;
      c.stack.pop_back();
      if (!emit(c, a)) return false;
    }
    return true;
  }

  bool admissible(const Config& c, int steps) {
    long len = static_cast<long>(c.emitted.size());
    long symbols = 0;
    long nf_cost = len;
    for (const Entry& e : c.stack) {
      if (e.terminal) {
        ++len;
        ++nf_cost;
        continue;
      }
      if (e.ctl.empty()) return false;
      bool has_bottom = e.ctl.front() == kBottom;
      long own = static_cast<long>(e.ctl.size()) - (has_bottom ? 1 : 0);
      symbols += own;
      nf_cost += own;
      if (!has_bottom) len += minlen_[e.sym];
    }
    if (len > limit_) return false;
    if (nf_ && steps > 0 && nf_cost > limit_) return false;
    if (steps + symbols > max_steps_) {
      step_cut = true;
      return false;
    }
    return true;
  }

  void dfs(Config c, int steps, Weight w, std::vector<int>& path) {
    if (++nodes > cap_)
      throw ResourceExceeded("derivation search exceeded " + std::to_string(cap_) + " nodes");
    if (!settle(c)) return;
    if (c.stack.empty()) {
      on_done(c, w, path);
      return;
    }
    Entry& top = c.stack.back();
    if (top.ctl.size() == 1 && top.ctl[0] == kBottom) {
      open_gap(std::move(c), steps, w, path);
      return;
    }
    if (!admissible(c, steps)) return;
    auto it = index_.find(key(top.sym, top.ctl.back(), c.state, top.ctl_state));
    if (it == index_.end()) return;
    for (int ri : it->second) {
      const TwoLevelRule& r = g_.rules[ri];
      const Entry& cur = c.stack.back();
      if (r.dist < 0 && (cur.ctl.size() != 1 || !r.push.empty() || r.ctl_to != g_.ctl_final))
        continue;
      Config n;
      n.state = r.to_state;
      n.emitted = c.emitted;
      n.gap = c.gap;
      n.stack.assign(c.stack.begin(), c.stack.end() - 1);
      if (r.scan >= 0 && !emit(n, r.scan)) continue;
      for (int u = static_cast<int>(r.rhs.size()) - 1; u >= 0; --u) {
        const Unit& unit = r.rhs[u];
        Entry e;
        e.terminal = unit.terminal;
        e.sym = unit.sym;
        if (!unit.terminal) {
          if (u == r.dist) {
            e.ctl_state = r.ctl_to;
            e.ctl.assign(cur.ctl.begin(), cur.ctl.end() - 1);
            for (auto b = r.push.rbegin(); b != r.push.rend(); ++b) e.ctl.push_back(*b);
          } else {
            e.ctl_state = g_.ctl_init;
            e.ctl = {g_.ctl_start};
          }
        }
        n.stack.push_back(std::move(e));
      }
      if (record) path.push_back(ri);
      dfs(std::move(n), steps + 1, sr_.times(w, r.weight), path);
      if (record) path.pop_back();
    }
  }

  // The gap foot is on top: its yield is some target substring starting
  // here, and it returns in some controllee state.
  void open_gap(Config c, int steps, const Weight& w, std::vector<int>& path) {
    if (!target || c.gap.seen) return;
    Entry foot = std::move(c.stack.back());
    c.stack.pop_back();
    const int j = static_cast<int>(c.emitted.size());
    for (int k = j; k <= static_cast<int>(target->size()); ++k) {
      for (int r = 0; r < g_.n_states; ++r) {
        Config n;
        n.state = r;
        n.emitted.assign(target->begin(), target->begin() + k);
        n.stack = c.stack;
        n.gap = {true, j, k, c.state, r, foot.sym, foot.ctl_state};
        dfs(std::move(n), steps, w, path);
      }
    }
  }

  const TwoLevelGrammar& g_;
  Semiring sr_;
  int limit_;
  int max_steps_;
  std::size_t cap_;
  bool nf_;
  std::unordered_map<std::uint64_t, std::vector<int>> index_;
  std::vector<int> minlen_;
};

bool yield_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

Config start_config(const TwoLevelGrammar& g) {
  Config c;
  c.state = g.init_state;
  Entry s;
  s.sym = g.start;
  s.ctl_state = g.ctl_init;
  s.ctl = {g.ctl_start};
  c.stack.push_back(std::move(s));
  return c;
}

EnumerateResult run_enumeration(const TwoLevelGrammar& g, const Semiring& sr,
                                const std::vector<int>* target, const OracleOptions& opt) {
  for (const auto& r : g.rules) sr.check(r.weight);
  EnumerateResult res;
  res.normal_form = looks_normal(g);
  const int limit = target ? static_cast<int>(target->size()) : opt.max_len;
  Search search(g, sr, limit, opt.max_steps, node_cap_from_env(opt.node_cap), res.normal_form);
  search.target = target;
  search.record = opt.record;
  std::map<std::vector<int>, Weight, decltype(&yield_less)> sums(&yield_less);
  search.on_done = [&](const Config& c, const Weight& w, const std::vector<int>& path) {
    if (c.state != g.final_state) return;
    if (target && c.emitted.size() != target->size()) return;
    auto [it, fresh] = sums.emplace(c.emitted, w);
    if (!fresh) it->second = sr.plus(it->second, w);
    res.longest = std::max(res.longest, static_cast<int>(path.size()));
    if (opt.record) res.derivations.push_back({path, c.emitted, w});
  };
  search.run(start_config(g));
  res.nodes = search.nodes;
  res.complete = !search.step_cut || (res.normal_form && opt.max_steps >= step_bound(limit));
  for (auto& [y, w] : sums) res.strings.push_back({y, w});
  if (opt.record) {
    std::sort(res.derivations.begin(), res.derivations.end(),
              [](const OracleDerivation& a, const OracleDerivation& b) {
                if (a.yield != b.yield) return yield_less(a.yield, b.yield);
                return a.rules < b.rules;
              });
  }
  return res;
}

}  // namespace

int step_bound(int n) { return 8 * (n + 1); }

EnumerateResult enumerate(const TwoLevelGrammar& g, const Semiring& sr, const OracleOptions& opt) {
  return run_enumeration(g, sr, nullptr, opt);
}

EnumerateResult enumerate_string(const TwoLevelGrammar& g, const Semiring& sr,
                                 const std::vector<int>& s, const OracleOptions& opt) {
  return run_enumeration(g, sr, &s, opt);
}

Weight oracle_stringsum(const TwoLevelGrammar& g, const Semiring& sr, const std::vector<int>& s,
                        int max_steps) {
  OracleOptions opt;
  opt.max_len = static_cast<int>(s.size());
  opt.max_steps = max_steps > 0 ? max_steps : step_bound(opt.max_len);
  EnumerateResult r = enumerate_string(g, sr, s, opt);
  return r.strings.empty() ? sr.zero() : r.strings.front().weight;
}

Weight oracle_allsum_truncated(const TwoLevelGrammar& g, const Semiring& sr, int max_steps,
                               int max_len) {
  OracleOptions opt;
  opt.max_len = max_len;
  opt.max_steps = max_steps;
  EnumerateResult r = enumerate(g, sr, opt);
  Weight total = sr.zero();
  for (const auto& sw : r.strings) total = sr.plus(total, sw.weight);
  return total;
}

std::optional<OracleDerivation> replay(const TwoLevelGrammar& g, const Semiring& sr,
                                       const std::vector<int>& rules) {
  Config c = start_config(g);
  Weight w = sr.one();
  auto flush = [&] {
    while (!c.stack.empty() && c.stack.back().terminal) {
      c.emitted.push_back(c.stack.back().sym);
      c.stack.pop_back();
    }
  };
  for (int ri : rules) {
    flush();
    if (ri < 0 || ri >= static_cast<int>(g.rules.size()) || c.stack.empty()) return std::nullopt;
    const TwoLevelRule& r = g.rules[ri];
    Entry cur = c.stack.back();
    if (cur.ctl.empty() || r.lhs != cur.sym || r.pop != cur.ctl.back() ||
        r.from_state != c.state || r.ctl_from != cur.ctl_state)
      return std::nullopt;
    if (r.dist < 0 && (cur.ctl.size() != 1 || !r.push.empty() || r.ctl_to != g.ctl_final))
      return std::nullopt;
    c.stack.pop_back();
    c.state = r.to_state;
    if (r.scan >= 0) c.emitted.push_back(r.scan);
    for (int u = static_cast<int>(r.rhs.size()) - 1; u >= 0; --u) {
      Entry e;
      e.terminal = r.rhs[u].terminal;
      e.sym = r.rhs[u].sym;
      if (!e.terminal) {
        if (u == r.dist) {
          e.ctl_state = r.ctl_to;
          e.ctl.assign(cur.ctl.begin(), cur.ctl.end() - 1);
          for (auto b = r.push.rbegin(); b != r.push.rend(); ++b) e.ctl.push_back(*b);
        } else {
          e.ctl_state = g.ctl_init;
          e.ctl = {g.ctl_start};
        }
      }
      c.stack.push_back(std::move(e));
    }
    w = sr.times(w, r.weight);
  }
  flush();
  if (!c.stack.empty() || c.state != g.final_state) return std::nullopt;
  return OracleDerivation{rules, c.emitted, w};
}

std::map<SpanItem, Weight> enumerate_pop_computations(const TwoLevelGrammar& g, const Semiring& sr,
                                                     const std::vector<int>& str, int x, int a,
                                                     int e, int p) {
  std::map<SpanItem, Weight> out;
  const int n = static_cast<int>(str.size());
  for (int gapped = 0; gapped < 2; ++gapped) {
    for (int i = 0; i <= n; ++i) {
      Search search(g, sr, n, INT_MAX / 4, node_cap_from_env(0), true);
      search.target = &str;
      search.on_done = [&](const Config& c, const Weight& w, const std::vector<int>&) {
        if (static_cast<bool>(gapped) != c.gap.seen) return;
        SpanItem t;
        t.i = i;
        t.l = static_cast<int>(c.emitted.size());
        t.x = x;
        t.a = a;
        t.p = p;
        t.s = c.state;
        t.e = e;
        if (c.gap.seen) {
          t.j = c.gap.j;
          t.k = c.gap.k;
          t.y = c.gap.y;
          t.q = c.gap.q;
          t.r = c.gap.r;
          t.f = c.gap.f;
        }
        auto [it, fresh] = out.emplace(t, w);
        if (!fresh) it->second = sr.plus(it->second, w);
      };
      Config c;
      c.state = p;
      c.emitted.assign(str.begin(), str.begin() + i);
      Entry root;
      root.sym = x;
      root.ctl_state = e;
      root.ctl = gapped ? std::vector<int>{kBottom, a} : std::vector<int>{a};
      c.stack.push_back(std::move(root));
      search.run(std::move(c));
    }
  }
  return out;
}

}  // namespace tlw
