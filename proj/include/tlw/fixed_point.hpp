#ifndef TLW_FIXED_POINT_HPP
#define TLW_FIXED_POINT_HPP

#include <vector>

#include "tlw/semiring.hpp"

namespace tlw {

struct SolverConfig {
  double tol = 1e-12;
  int max_sweeps = 10000;
  /** Read values updated earlier in the same sweep instead of the previous
   *  sweep's values. */
  bool gauss_seidel = false;
};

enum class SolveStatus : std::uint8_t { converged, diverged };

struct FixedPointResult {
  std::vector<Weight> values;
  SolveStatus status = SolveStatus::converged;
  int sweeps = 0;
  /** Number of (sweep, variable) pairs where a value decreased. Kleene
   *  iteration from zero is monotone, so anything nonzero is a bug. */
  int monotonicity_violations = 0;
};

/** A system x_v = sum over terms of coef * x_{v1} * ... * x_{vk}, solved by
 *  Kleene iteration from all-zero. */
class FixedPointSystem {
 public:
  explicit FixedPointSystem(Semiring sr) : sr_(sr) {}

  int add_variable();
  int size() const { return static_cast<int>(terms_.size()); }
  void add_term(int var, const Weight& coef, std::vector<int> factors);
  std::size_t term_count() const;

  /** Real values beyond this threshold are treated as infinite. */
  static constexpr double kInfinityThreshold = 1e30;

  FixedPointResult solve(const SolverConfig& cfg) const;

 private:
  struct Term {
    Weight coef;
    std::vector<int> factors;
  };

  Weight evaluate(int var, const std::vector<Weight>& x) const;

  Semiring sr_;
  std::vector<std::vector<Term>> terms_;
};

}  // namespace tlw

#endif
