#include "walk_product.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

#include "nf_internal.hpp"

namespace tlw::nf_detail {

namespace {

struct Part {
  std::vector<Sym> rhs;
  Weight weight;
};

class Builder {
 public:
  Builder(const GrammarSpec& ctl, const Walk& walk, const Semiring& sr, const SolverConfig& cfg)
      : ctl_(ctl), walk_(walk), sr_(sr), cfg_(cfg), t_(*ctl.symbols) {}

  ProductResult run() {
    index();
    solve_constants();
    find_targets();
    return emit();
  }

 private:
  bool constant_state(int s) const { return s == end_ || walk_.summed[s]; }

  void index() {
    end_ = walk_.end();
    n_nt_ = t_.size(Ns::controller_nt);
    rules_of_.assign(n_nt_, {});
    for (const auto& p : ctl_.cfg) {
      if (p.rhs.size() > 2) throw std::logic_error("walk product needs a binarized controller");
      rules_of_[p.lhs].push_back(&p);
    }
    for (const auto& [label, steps] : walk_.steps) {
      for (const WalkStep& st : steps) {
        if (constant_state(st.from) && !constant_state(st.to))
          throw std::logic_error("walk leaves the summed states");
        steps_from_[{label, st.from}].push_back(&st);
      }
    }
    zindex_.assign(end_ + 1, -1);
    for (int s = 0; s <= end_; ++s) {
      if (constant_state(s)) {
        zindex_[s] = static_cast<int>(zstates_.size());
        zstates_.push_back(s);
      }
    }
  }

  const std::vector<const WalkStep*>& steps(int label, int from) const {
    static const std::vector<const WalkStep*> none;
    auto it = steps_from_.find({label, from});
    return it == steps_from_.end() ? none : it->second;
  }

  int cvar(int a, int u, int t) const {
    const int nz = static_cast<int>(zstates_.size());
    return (a * nz + zindex_[u]) * nz + zindex_[t];
  }

  // x_{u..t} = sum of rules; each side of a binary rule either a label step
  // or another constant.
  void solve_constants() {
    FixedPointSystem sys(sr_);
    const int nz = static_cast<int>(zstates_.size());
    for (int i = 0; i < n_nt_ * nz * nz; ++i) sys.add_variable();
    struct Factor {
      Weight coef;
      std::vector<int> vars;
    };
    auto parts = [&](const Sym& x, int u, int m) {
      std::vector<Factor> out;
      if (x.is_nt) {
        out.push_back({sr_.one(), {cvar(x.id, u, m)}});
        return out;
      }
      for (const WalkStep* st : steps(x.id, u)) {
        if (st->to != m) continue;
        Factor f{st->weight, {}};
        for (int s : st->fresh_factors) f.vars.push_back(cvar(ctl_.start, s, end_));
        out.push_back(std::move(f));
      }
      return out;
    };
    for (int a = 0; a < n_nt_; ++a) {
      for (const WcfgProduction* p : rules_of_[a]) {
        for (int u : zstates_) {
          for (int t : zstates_) {
            int v = cvar(a, u, t);
            if (p->rhs.empty()) {
              if (u == t) sys.add_term(v, p->weight, {});
            } else if (p->rhs.size() == 1) {
              for (auto& f : parts(p->rhs[0], u, t)) sys.add_term(v, sr_.times(p->weight, f.coef), f.vars);
            } else {
              for (int m : zstates_) {
                auto left = parts(p->rhs[0], u, m);
                if (left.empty()) continue;
                auto right = parts(p->rhs[1], m, t);
                for (auto& l : left) {
                  for (auto& r : right) {
                    std::vector<int> vars = l.vars;
                    vars.insert(vars.end(), r.vars.begin(), r.vars.end());
                    sys.add_term(v, sr_.times(p->weight, sr_.times(l.coef, r.coef)), std::move(vars));
                  }
                }
              }
            }
          }
        }
      }
    }
    constants_ = solve(sys, cfg_, "empty-yield weights");
  }

  Weight step_weight(const WalkStep& st) const {
    Weight w = st.weight;
    for (int s : st.fresh_factors) w = sr_.times(w, constants_[cvar(ctl_.start, s, end_)]);
    return w;
  }

  // Total weight of x deriving the walk from u to t, both constant states.
  Weight constant(const Sym& x, int u, int t) const {
    if (x.is_nt) return constants_[cvar(x.id, u, t)];
    Weight w = sr_.zero();
    for (const WalkStep* st : steps(x.id, u)) {
      if (st->to == t) w = sr_.plus(w, step_weight(*st));
    }
    return w;
  }

  // States reachable from s by deriving x (x must not start in a constant
  // state). Records a prediction for nonterminals.
  std::vector<int> targets(const Sym& x, int s, bool& changed) {
    std::vector<int> out;
    if (!x.is_nt) {
      for (const WalkStep* st : steps(x.id, s)) {
        if (!sr_.is_zero(step_weight(*st))) out.push_back(st->to);
      }
      return out;
    }
    auto [it, fresh] = targets_[x.id].try_emplace(s);
    if (fresh) changed = true;
    return {it->second.begin(), it->second.end()};
  }

  std::vector<int> constant_targets(const Sym& x, int m) const {
    std::vector<int> out;
    for (int t : zstates_) {
      if (!sr_.is_zero(constant(x, m, t))) out.push_back(t);
    }
    return out;
  }

  // Which (A, s, t) copies derive anything, explored from the start states.
  void find_targets() {
    targets_.assign(n_nt_, {});
    for (int s : walk_.starts) targets_[ctl_.start].try_emplace(s);
    for (bool changed = true; changed;) {
      changed = false;
      for (int a = 0; a < n_nt_; ++a) {
        for (auto it = targets_[a].begin(); it != targets_[a].end(); ++it) {
          const int s = it->first;
          std::vector<int> found;
          for (const WcfgProduction* p : rules_of_[a]) {
            if (p->rhs.empty()) {
              found.push_back(s);
            } else if (p->rhs.size() == 1) {
              auto ts = targets(p->rhs[0], s, changed);
              found.insert(found.end(), ts.begin(), ts.end());
            } else {
              for (int m : targets(p->rhs[0], s, changed)) {
                auto ts = constant_state(m) ? constant_targets(p->rhs[1], m)
                                            : targets(p->rhs[1], m, changed);
                found.insert(found.end(), ts.begin(), ts.end());
              }
            }
          }
          for (int t : found) {
            if (it->second.insert(t).second) changed = true;
          }
        }
      }
    }
  }

  bool derives(int a, int s, int t) const {
    auto it = targets_[a].find(s);
    return it != targets_[a].end() && it->second.count(t) > 0;
  }

  std::string state_name(int s) const { return s == end_ ? "$" : walk_.state_names[s]; }

  int symbol(int a, int s, int t) {
    auto key = std::make_tuple(a, s, t);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    int id = fresh_symbol(t_, Ns::controller_nt,
                          t_.name(Ns::controller_nt, a) + "{" + state_name(s) + "|" +
                              state_name(t) + "}");
    ids_.emplace(key, id);
    queue_.push_back(key);
    return id;
  }

  std::vector<Sym> resolve(const std::vector<Sym>& emit) const {
    std::vector<Sym> out = emit;
    for (Sym& s : out) {
      if (s.is_nt && s.id == kProductStart) s.id = start_;
    }
    return out;
  }

  // Ways for x to lead from s to t, as right-hand-side fragments.
  std::vector<Part> parts(const Sym& x, int s, int t) {
    std::vector<Part> out;
    if (x.is_nt) {
      if (derives(x.id, s, t)) out.push_back({{{true, symbol(x.id, s, t)}}, sr_.one()});
      return out;
    }
    for (const WalkStep* st : steps(x.id, s)) {
      if (st->to != t) continue;
      Weight w = step_weight(*st);
      if (!sr_.is_zero(w)) out.push_back({resolve(st->emit), w});
    }
    return out;
  }

  std::vector<int> known_targets(const Sym& x, int s) const {
    std::vector<int> out;
    if (!x.is_nt) {
      for (const WalkStep* st : steps(x.id, s)) out.push_back(st->to);
    } else if (auto it = targets_[x.id].find(s); it != targets_[x.id].end()) {
      out.assign(it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void expand(int a, int s, int t, int id, std::vector<WcfgProduction>& out) {
    for (const WcfgProduction* p : rules_of_[a]) {
      if (p->rhs.empty()) {
        if (s == t) out.push_back({id, {}, p->weight});
        continue;
      }
      if (p->rhs.size() == 1) {
        for (Part& part : parts(p->rhs[0], s, t))
          out.push_back({id, std::move(part.rhs), sr_.times(p->weight, part.weight)});
        continue;
      }
      for (int m : known_targets(p->rhs[0], s)) {
        auto left = parts(p->rhs[0], s, m);
        if (left.empty()) continue;
        if (constant_state(m)) {
          Weight c = constant(p->rhs[1], m, t);
          if (sr_.is_zero(c)) continue;
          for (Part& l : left)
            out.push_back({id, l.rhs, sr_.times(p->weight, sr_.times(l.weight, c))});
          continue;
        }
        auto right = parts(p->rhs[1], m, t);
        for (const Part& l : left) {
          for (const Part& r : right) {
            std::vector<Sym> rhs = l.rhs;
            rhs.insert(rhs.end(), r.rhs.begin(), r.rhs.end());
            out.push_back({id, std::move(rhs), sr_.times(p->weight, sr_.times(l.weight, r.weight))});
          }
        }
      }
    }
  }

  ProductResult emit() {
    start_ = fresh_symbol(t_, Ns::controller_nt, t_.name(Ns::controller_nt, ctl_.start));
    std::vector<WcfgProduction> out;
    for (int s : walk_.starts) {
      if (derives(ctl_.start, s, end_))
        out.push_back({start_, {{true, symbol(ctl_.start, s, end_)}}, sr_.one()});
    }
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      auto [a, s, t] = queue_[i];
      expand(a, s, t, ids_.at(queue_[i]), out);
    }
    ProductResult res;
    res.controller = ctl_;
    res.controller.cfg = std::move(out);
    res.controller.start = start_;
    trim_wcfg(res.controller, sr_);
    res.fresh_weight.assign(end_ + 1, sr_.zero());
    for (int s = 0; s < end_; ++s) {
      if (walk_.summed[s]) res.fresh_weight[s] = constants_[cvar(ctl_.start, s, end_)];
    }
    return res;
  }

  const GrammarSpec& ctl_;
  const Walk& walk_;
  Semiring sr_;
  SolverConfig cfg_;
  SymbolTable& t_;

  int end_ = 0;
  int n_nt_ = 0;
  int start_ = 0;
  std::vector<std::vector<const WcfgProduction*>> rules_of_;
  std::map<std::pair<int, int>, std::vector<const WalkStep*>> steps_from_;
  std::vector<int> zstates_;
  std::vector<int> zindex_;
  std::vector<Weight> constants_;
  std::vector<std::map<int, std::set<int>>> targets_;
  std::map<std::tuple<int, int, int>, int> ids_;
  std::vector<std::tuple<int, int, int>> queue_;
};

}  // namespace

ProductResult walk_product(const GrammarSpec& controller, const Walk& walk, const Semiring& sr,
                           const SolverConfig& cfg) {
  return Builder(controller, walk, sr, cfg).run();
}

}  // namespace tlw::nf_detail
