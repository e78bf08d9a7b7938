#ifndef TLW_SEMIRING_HPP
#define TLW_SEMIRING_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace tlw {

enum class SemiringKind : std::uint8_t { boolean, real, counting, viterbi };

std::string_view to_string(SemiringKind k);

/** A semiring element tagged with the instance it belongs to.
 *  Booleans, reals and Viterbi probabilities live in `x`; counts in `n`. */
struct Weight {
  SemiringKind kind = SemiringKind::real;
  double x = 0.0;
  std::uint64_t n = 0;

  friend bool operator==(const Weight& a, const Weight& b) {
    return a.kind == b.kind && a.x == b.x && a.n == b.n;
  }
  friend bool operator!=(const Weight& a, const Weight& b) { return !(a == b); }
};

/** One of the four weight algebras. Instances are small immutable values. */
class Semiring {
 public:
  static constexpr std::uint64_t kInfiniteCount =
      std::numeric_limits<std::uint64_t>::max();
  static constexpr std::uint64_t kDefaultCountingCap = std::uint64_t{1} << 62;
  static constexpr double kDefaultTolerance = 1e-12;

  explicit Semiring(SemiringKind kind,
                    std::uint64_t counting_cap = kDefaultCountingCap,
                    bool counting_has_infinity = true);

  static Semiring boolean() { return Semiring(SemiringKind::boolean); }
  static Semiring real() { return Semiring(SemiringKind::real); }
  static Semiring counting() { return Semiring(SemiringKind::counting); }
  static Semiring viterbi() { return Semiring(SemiringKind::viterbi); }
  /** Accepts "boolean", "real", "counting" or "viterbi". */
  static Semiring from_name(std::string_view name);

  SemiringKind kind() const { return kind_; }
  std::string_view name() const { return to_string(kind_); }

  Weight zero() const;
  Weight one() const;
  Weight plus(const Weight& a, const Weight& b) const;
  Weight times(const Weight& a, const Weight& b) const;
  /** Least w with w = 1 + a*w. Only for omega-continuous instances. */
  Weight star(const Weight& a) const;

  bool is_idempotent() const;
  bool is_omega_continuous() const;

  bool is_zero(const Weight& a) const;
  bool is_infinite(const Weight& a) const;
  /** Natural order: a <= b iff b = a + c for some c. */
  bool leq(const Weight& a, const Weight& b) const;
  /** Relative closeness for real and Viterbi; exact equality otherwise. */
  bool approx_eq(const Weight& a, const Weight& b,
                 double tol = kDefaultTolerance) const;

  /** Converts a decimal literal from a grammar file. Boolean and counting
   *  accept only 0 and 1; Viterbi accepts [0,1]; real accepts [0,inf]. */
  Weight from_double(double v) const;
  Weight infinity() const;
  Weight from_count(std::uint64_t c) const;
  double to_double(const Weight& a) const;
  /** Exact text for boolean and counting, 12 significant digits otherwise. */
  std::string format(const Weight& a) const;

  /** Throws TypeError if `a` does not belong to this instance. */
  void check(const Weight& a) const;

 private:
  Weight make_x(double v) const;
  std::uint64_t saturate(std::uint64_t v) const;

  SemiringKind kind_;
  std::uint64_t cap_;
  bool counting_has_infinity_;
};

}  // namespace tlw

#endif
