#include "tlw/fixed_point.hpp"

#include <algorithm>
#include <cmath>

namespace tlw {

int FixedPointSystem::add_variable() {
  terms_.emplace_back();
  return size() - 1;
}

void FixedPointSystem::add_term(int var, const Weight& coef, std::vector<int> factors) {
  if (sr_.is_zero(coef)) return;
  terms_[var].push_back({coef, std::move(factors)});
}

std::size_t FixedPointSystem::term_count() const {
  std::size_t n = 0;
  for (const auto& t : terms_) n += t.size();
  return n;
}

Weight FixedPointSystem::evaluate(int var, const std::vector<Weight>& x) const {
  Weight sum = sr_.zero();
  for (const Term& t : terms_[var]) {
    Weight prod = t.coef;
    for (int f : t.factors) {
      prod = sr_.times(prod, x[f]);
      if (sr_.is_zero(prod)) break;
    }
    sum = sr_.plus(sum, prod);
  }
  if (sr_.kind() == SemiringKind::real && sum.x > kInfinityThreshold) return sr_.infinity();
  return sum;
}

FixedPointResult FixedPointSystem::solve(const SolverConfig& cfg) const {
  FixedPointResult res;
  const int n = size();
  std::vector<Weight> x(n, sr_.zero());
  std::vector<Weight> next(n, sr_.zero());
  const bool exact = sr_.kind() == SemiringKind::boolean || sr_.kind() == SemiringKind::counting;
  double prev_delta = -1.0;
  std::vector<char> moved(n, 0);
  res.status = SolveStatus::diverged;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    res.sweeps = sweep;
    bool changed = false;
    bool went_infinite = false;
    double delta = 0.0;
    std::vector<Weight>& target = cfg.gauss_seidel ? x : next;
    for (int v = 0; v < n; ++v) {
      Weight old = x[v];
      Weight val = evaluate(v, x);
      if (!sr_.leq(old, val)) ++res.monotonicity_violations;
      moved[v] = val != old;
      if (val != old) {
        changed = true;
        if (sr_.is_infinite(val)) went_infinite = true;
        if (!exact && !sr_.is_infinite(val)) {
          double scale = std::max(1.0, std::fabs(val.x));
          delta = std::max(delta, std::fabs(val.x - old.x) / scale);
        }
      }
      target[v] = val;
    }
    if (!cfg.gauss_seidel) x.swap(next);
    if (!changed) {
      res.status = SolveStatus::converged;
      break;
    }
    if (!exact && !went_infinite && delta <= cfg.tol) {
      // Geometric tail estimate: with contraction ratio rho the remaining
      // distance to the limit is about delta * rho / (1 - rho).
      double rho = prev_delta > 0.0 ? delta / prev_delta : 1.0;
      if (rho < 1.0 && delta * rho / (1.0 - rho) <= cfg.tol) {
        res.status = SolveStatus::converged;
        break;
      }
    }
    prev_delta = delta;
  }
  // A strictly increasing sequence of naturals is unbounded, so counting
  // values still moving when the budget runs out have an infinite limit.
  if (res.status == SolveStatus::diverged && sr_.kind() == SemiringKind::counting) {
    for (int v = 0; v < n; ++v)
      if (moved[v]) x[v] = sr_.infinity();
  }
  res.values = std::move(x);
  return res;
}

}  // namespace tlw
