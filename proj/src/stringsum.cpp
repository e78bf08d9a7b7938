#include "tlw/stringsum.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "tlw/errors.hpp"

namespace tlw {

namespace {

struct SpanItemHash {
  std::size_t operator()(const SpanItem& t) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : {t.i, t.l, t.j, t.k, t.x, t.a, t.y, t.p, t.s, t.q, t.r, t.e, t.f})
      h = (h ^ static_cast<std::size_t>(v + 2)) * 0x100000001b3ULL;
    return h;
  }
};

// Left half of a push-1 partner: the gapped item's outer-left corner,
// symbols and states, and its span.
struct PartnerKey {
  int i, p, x, a, l, s, e, span;
  bool operator==(const PartnerKey&) const = default;
};

struct PartnerHash {
  std::size_t operator()(const PartnerKey& k) const {
    std::size_t h = 0x84222325cbf29ce4ULL;
    for (int v : {k.i, k.p, k.x, k.a, k.l, k.s, k.e, k.span})
      h = (h ^ static_cast<std::size_t>(v + 2)) * 0x100000001b3ULL;
    return h;
  }
};

enum class Via : std::uint8_t { none, term, pop_left, pop_right, push1, push2 };

struct Back {
  Via via = Via::none;
  int rule = -1;
  int left = -1;   // antecedent item ids
  int right = -1;
};

class Engine {
 public:
  Engine(const TwoLevelNF& nf, const std::vector<int>& s, const Semiring& sr, bool track)
      : g_(nf.grammar()), s_(s), sr_(sr), track_(track), n_(static_cast<int>(s.size())) {
    for (int a : s)
      if (a < 0 || a >= g_.n_terminals())
        throw InputError("symbol id " + std::to_string(a) + " is not a terminal of the grammar");
    for (std::size_t i = 0; i < g_.rules.size(); ++i) {
      const TwoLevelRule& r = g_.rules[i];
      sr_.check(r.weight);
      if (sr_.is_zero(r.weight)) continue;
      int id = static_cast<int>(i);
      switch (r.kind) {
        case RuleKind::eps: eps_.push_back(id); break;
        case RuleKind::term:
          term_[r.scan >= 0 ? r.scan : r.rhs[0].sym].push_back(id);
          break;
        case RuleKind::pop_left: pop_left_[r.rhs[1].sym].push_back(id); break;
        case RuleKind::pop_right: pop_right_[r.rhs[0].sym].push_back(id); break;
        case RuleKind::push: push_[push_key(r.lhs, r.from_state, r.push[0], r.ctl_to)].push_back(id); break;
        default: throw NotNormalForm({describe_rule(g_, r)});
      }
    }
    u_by_span_.resize(n_ + 1);
    g_by_span_.resize(n_ + 1);
  }

  void run() {
    for (int len = 1; len <= n_; ++len) {
      ungapped_phase(len);
      gapped_phase(len);
    }
  }

  Weight goal_weight() const {
    if (n_ == 0) {
      Weight w = sr_.zero();
      for (int ri : eps_) w = sr_.plus(w, g_.rules[ri].weight);
      return w;
    }
    int id = find(goal_item());
    return id < 0 ? sr_.zero() : weights_[id];
  }

  Chart chart() const {
    Chart c;
    c.n = n_;
    c.goal = goal_weight();
    for (std::size_t i = 0; i < items_.size(); ++i) {
      c.entries.push_back({items_[i], weights_[i]});
      if (items_[i].gapped())
        ++c.gapped;
      else
        ++c.ungapped;
    }
    return c;
  }

  std::optional<BestDerivation> best() const {
    if (n_ == 0) {
      int best = -1;
      for (int ri : eps_)
        if (best < 0 || better(g_.rules[ri].weight, g_.rules[best].weight)) best = ri;
      if (best < 0) return std::nullopt;
      return BestDerivation{g_.rules[best].weight, {best}};
    }
    int id = find(goal_item());
    if (id < 0 || sr_.is_zero(weights_[id])) return std::nullopt;
    BestDerivation d;
    d.weight = weights_[id];
    linear_ungapped(id, d.rules);
    return d;
  }

 private:
  static std::uint64_t push_key(int x, int p, int b, int e) {
    return ((static_cast<std::uint64_t>(x) * 1000003u + static_cast<std::uint64_t>(b)) * 1009u +
            static_cast<std::uint64_t>(p)) * 1009u + static_cast<std::uint64_t>(e);
  }

  SpanItem goal_item() const {
    SpanItem t;
    t.i = 0;
    t.l = n_;
    t.x = g_.start;
    t.a = g_.ctl_start;
    t.p = g_.init_state;
    t.s = g_.final_state;
    t.e = g_.ctl_init;
    return t;
  }

  int find(const SpanItem& t) const {
    auto it = ids_.find(t);
    return it == ids_.end() ? -1 : it->second;
  }

  bool better(const Weight& cand, const Weight& cur) const {
    return sr_.plus(cur, cand) != cur;
  }

  void add(const SpanItem& t, const Weight& w, Back b) {
    if (sr_.is_zero(w)) return;
    bool ordered = 0 <= t.i && t.l <= n_ &&
                   (t.gapped() ? (t.i <= t.j && t.j <= t.k && t.k <= t.l) : t.i <= t.l);
    if (!ordered) throw std::logic_error("chart item with unordered positions");
    auto [it, fresh] = ids_.emplace(t, static_cast<int>(items_.size()));
    if (fresh) {
      items_.push_back(t);
      weights_.push_back(w);
      backs_.push_back(b);
      int span = t.span();
      if (t.gapped()) {
        g_by_span_[span].push_back(it->second);
        partners_[{t.i, t.p, t.x, t.a, t.l, t.s, t.e, span}].push_back(it->second);
      } else {
        u_by_span_[span].push_back(it->second);
      }
      return;
    }
    Weight& cur = weights_[it->second];
    if (track_ && better(w, cur)) backs_[it->second] = b;
    cur = sr_.plus(cur, w);
  }

  void ungapped_phase(int len) {
    if (len == 1) {
      for (int i = 0; i < n_; ++i) {
        auto found = term_.find(s_[i]);
        if (found == term_.end()) continue;
        for (int ri : found->second) {
          const TwoLevelRule& r = g_.rules[ri];
          SpanItem t;
          t.i = i;
          t.l = i + 1;
          t.x = r.lhs;
          t.a = r.pop;
          t.p = r.from_state;
          t.s = r.to_state;
          t.e = r.ctl_from;
          add(t, r.weight, {Via::term, ri, -1, -1});
        }
      }
    }
    // push-2: a gapped item whose gap is filled by an ungapped item.
    for (int a = 1; a < len; ++a) {
      for (int gi : g_by_span_[a]) {
        const SpanItem g1 = items_[gi];
        if (g1.k - g1.j != len - a) continue;
        auto rules = push_.find(push_key(g1.x, g1.p, g1.a, g1.e));
        if (rules == push_.end()) continue;
        for (int ri : rules->second) {
          const TwoLevelRule& r = g_.rules[ri];
          SpanItem u2;
          u2.i = g1.j;
          u2.l = g1.k;
          u2.x = g1.y;
          u2.a = r.push[1];
          u2.p = g1.q;
          u2.s = g1.r;
          u2.e = g1.f;
          int ui = find(u2);
          if (ui < 0) continue;
          SpanItem t;
          t.i = g1.i;
          t.l = g1.l;
          t.x = r.lhs;
          t.a = r.pop;
          t.p = r.from_state;
          t.s = g1.s;
          t.e = r.ctl_from;
          Weight w = sr_.times(r.weight, sr_.times(weights_[gi], weights_[ui]));
          add(t, w, {Via::push2, ri, gi, ui});
        }
      }
    }
  }

  void gapped_phase(int len) {
    const std::vector<int> fresh = u_by_span_[len];
    for (int ui : fresh) {
      const SpanItem u = items_[ui];
      if (u.a != g_.ctl_start || u.e != g_.ctl_init) continue;
      if (auto it = pop_left_.find(u.x); it != pop_left_.end()) {
        for (int ri : it->second) {
          const TwoLevelRule& r = g_.rules[ri];
          Weight w = sr_.times(r.weight, weights_[ui]);
          for (int i = 0; i <= u.i; ++i) {
            SpanItem t;
            t.i = i;
            t.j = i;
            t.k = u.i;
            t.l = u.l;
            t.x = r.lhs;
            t.a = r.pop;
            t.y = r.rhs[0].sym;
            t.p = r.from_state;
            t.q = r.to_state;
            t.r = u.p;
            t.s = u.s;
            t.e = r.ctl_from;
            t.f = r.ctl_to;
            add(t, w, {Via::pop_left, ri, ui, -1});
          }
        }
      }
      if (auto it = pop_right_.find(u.x); it != pop_right_.end()) {
        for (int ri : it->second) {
          const TwoLevelRule& r = g_.rules[ri];
          if (r.to_state != u.p) continue;
          Weight w = sr_.times(r.weight, weights_[ui]);
          for (int k = u.l; k <= n_; ++k) {
            for (int s = 0; s < g_.n_states; ++s) {
              SpanItem t;
              t.i = u.i;
              t.j = u.l;
              t.k = k;
              t.l = k;
              t.x = r.lhs;
              t.a = r.pop;
              t.y = r.rhs[1].sym;
              t.p = r.from_state;
              t.q = u.s;
              t.r = s;
              t.s = s;
              t.e = r.ctl_from;
              t.f = r.ctl_to;
              add(t, w, {Via::pop_right, ri, ui, -1});
            }
          }
        }
      }
    }
    // push-1: two gapped items, the second filling the first one's gap.
    for (int a = 1; a < len; ++a) {
      for (int gi : g_by_span_[a]) {
        const SpanItem g1 = items_[gi];
        auto rules = push_.find(push_key(g1.x, g1.p, g1.a, g1.e));
        if (rules == push_.end()) continue;
        for (int ri : rules->second) {
          const TwoLevelRule& r = g_.rules[ri];
          auto partners =
              partners_.find({g1.j, g1.q, g1.y, r.push[1], g1.k, g1.r, g1.f, len - a});
          if (partners == partners_.end()) continue;
          const std::vector<int> list = partners->second;
          for (int gj : list) {
            const SpanItem g2 = items_[gj];
            SpanItem t = g1;
            t.a = r.pop;
            t.e = r.ctl_from;
            t.j = g2.j;
            t.k = g2.k;
            t.y = g2.y;
            t.q = g2.q;
            t.r = g2.r;
            t.f = g2.f;
            Weight w = sr_.times(r.weight, sr_.times(weights_[gi], weights_[gj]));
            add(t, w, {Via::push1, ri, gi, gj});
          }
        }
      }
    }
  }

  void linear_ungapped(int id, std::vector<int>& out) const {
    const Back& b = backs_[id];
    out.push_back(b.rule);
    if (b.via == Via::term) return;
    // push-2
    std::vector<int> right;
    linear_gapped(b.left, out, right);
    linear_ungapped(b.right, out);
    out.insert(out.end(), right.begin(), right.end());
  }

  // Appends the steps before the gap to `left` and returns the steps after
  // it in `right`.
  void linear_gapped(int id, std::vector<int>& left, std::vector<int>& right) const {
    const Back& b = backs_[id];
    left.push_back(b.rule);
    switch (b.via) {
      case Via::pop_left: {
        std::vector<int> z;
        linear_ungapped(b.left, z);
        right = std::move(z);
        return;
      }
      case Via::pop_right:
        linear_ungapped(b.left, left);
        right.clear();
        return;
      case Via::push1: {
        std::vector<int> r1, r2;
        linear_gapped(b.left, left, r1);
        linear_gapped(b.right, left, r2);
        right = std::move(r2);
        right.insert(right.end(), r1.begin(), r1.end());
        return;
      }
      default: throw std::logic_error("gapped item without a gapped backpointer");
    }
  }

  const TwoLevelGrammar& g_;
  const std::vector<int>& s_;
  Semiring sr_;
  bool track_;
  int n_;

  std::vector<int> eps_;
  std::unordered_map<int, std::vector<int>> term_, pop_left_, pop_right_;
  std::unordered_map<std::uint64_t, std::vector<int>> push_;

  std::vector<SpanItem> items_;
  std::vector<Weight> weights_;
  std::vector<Back> backs_;
  std::unordered_map<SpanItem, int, SpanItemHash> ids_;
  std::vector<std::vector<int>> u_by_span_, g_by_span_;
  std::unordered_map<PartnerKey, std::vector<int>, PartnerHash> partners_;
};

std::string json_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      o += '\\';
      o += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      o += buf;
    } else {
      o += c;
    }
  }
  return o;
}

}  // namespace

Chart fill_chart(const TwoLevelNF& g, const std::vector<int>& s, const Semiring& sr) {
  Engine e(g, s, sr, false);
  e.run();
  return e.chart();
}

Weight stringsum(const TwoLevelNF& g, const std::vector<int>& s, const Semiring& sr) {
  Engine e(g, s, sr, false);
  e.run();
  return e.goal_weight();
}

std::optional<BestDerivation> best_derivation(const TwoLevelNF& g, const std::vector<int>& s,
                                              const Semiring& sr) {
  if (!sr.is_idempotent())
    throw UnsupportedOperation("best derivation needs an idempotent semiring, not " +
                               std::string(sr.name()));
  Engine e(g, s, sr, true);
  e.run();
  return e.best();
}

double gapped_item_bound(const TwoLevelGrammar& g, int n) {
  // Number of position tuples 0 <= i <= j <= k <= l <= n is C(n+4, 4).
  double tuples = 1.0;
  for (int t = 1; t <= 4; ++t) tuples = tuples * (n + t) / t;
  double q = g.n_states, c = g.n_ctl_states;
  double x = g.n_nonterminals();
  return tuples * g.n_ctl_symbols() * x * x * q * q * q * q * c * c;
}

std::string chart_to_jsonl(const TwoLevelGrammar& g, const Chart& c, const Semiring& sr) {
  const SymbolTable& t = *g.symbols;
  std::string out;
  auto str = [](const std::string& s) { return "\"" + json_escape(s) + "\""; };
  for (const ChartEntry& ce : c.entries) {
    const SpanItem& it = ce.item;
    std::string line = "{\"gapped\":";
    line += it.gapped() ? "true" : "false";
    line += ",\"i\":" + std::to_string(it.i);
    if (it.gapped()) line += ",\"j\":" + std::to_string(it.j) + ",\"k\":" + std::to_string(it.k);
    line += ",\"l\":" + std::to_string(it.l);
    line += ",\"X\":" + str(t.name(Ns::controllee_nt, it.x));
    line += ",\"A\":" + str(t.name(Ns::controller_nt, it.a));
    if (it.gapped()) line += ",\"Y\":" + str(t.name(Ns::controllee_nt, it.y));
    if (controllee_is_pda(g.formalism)) {
      line += ",\"p\":" + str(t.name(Ns::controllee_state, it.p));
      line += ",\"s\":" + str(t.name(Ns::controllee_state, it.s));
      if (it.gapped()) {
        line += ",\"q\":" + str(t.name(Ns::controllee_state, it.q));
        line += ",\"r\":" + str(t.name(Ns::controllee_state, it.r));
      }
    }
    if (controller_is_pda(g.formalism)) {
      line += ",\"e\":" + str(t.name(Ns::controller_state, it.e));
      if (it.gapped()) line += ",\"f\":" + str(t.name(Ns::controller_state, it.f));
    }
    std::string w = sr.format(ce.weight);
    bool numeric = sr.kind() == SemiringKind::real || sr.kind() == SemiringKind::viterbi ||
                   sr.kind() == SemiringKind::counting;
    if (w == "inf") numeric = false;
    line += ",\"weight\":" + (numeric ? w : (w == "true" || w == "false" ? w : str(w)));
    line += "}\n";
    out += line;
  }
  return out;
}

std::vector<int> terminal_ids(const TwoLevelGrammar& g, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) {
    int id = g.symbols->find(Ns::terminal, n);
    if (id < 0) throw InputError("'" + n + "' is not a terminal of the grammar");
    out.push_back(id);
  }
  return out;
}

}  // namespace tlw
