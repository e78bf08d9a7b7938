#include "tlw/semiring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tlw/errors.hpp"

namespace tlw {

std::string_view to_string(SemiringKind k) {
  switch (k) {
    case SemiringKind::boolean: return "boolean";
    case SemiringKind::real: return "real";
    case SemiringKind::counting: return "counting";
    case SemiringKind::viterbi: return "viterbi";
  }
  return "?";
}

Semiring::Semiring(SemiringKind kind, std::uint64_t counting_cap,
                   bool counting_has_infinity)
    : kind_(kind), cap_(counting_cap), counting_has_infinity_(counting_has_infinity) {}

Semiring Semiring::from_name(std::string_view name) {
  if (name == "boolean") return boolean();
  if (name == "real") return real();
  if (name == "counting") return counting();
  if (name == "viterbi") return viterbi();
  throw InputError("unknown semiring '" + std::string(name) + "'");
}

void Semiring::check(const Weight& a) const {
  if (a.kind != kind_) {
    throw TypeError("weight from the " + std::string(to_string(a.kind)) +
                    " semiring used with the " + std::string(name()) +
                    " semiring");
  }
}

Weight Semiring::make_x(double v) const {
  Weight w;
  w.kind = kind_;
  w.x = v;
  return w;
}

Weight Semiring::from_count(std::uint64_t c) const {
  if (kind_ != SemiringKind::counting) return from_double(static_cast<double>(c));
  Weight w;
  w.kind = kind_;
  w.n = saturate(c);
  return w;
}

std::uint64_t Semiring::saturate(std::uint64_t v) const {
  if (v == kInfiniteCount || v > cap_) {
    if (!counting_has_infinity_) throw UnsupportedOperation("counting overflow");
    return kInfiniteCount;
  }
  return v;
}

Weight Semiring::zero() const {
  return kind_ == SemiringKind::counting ? from_count(0) : make_x(0.0);
}

Weight Semiring::one() const {
  return kind_ == SemiringKind::counting ? from_count(1) : make_x(1.0);
}

Weight Semiring::infinity() const {
  switch (kind_) {
    case SemiringKind::boolean: return one();
    case SemiringKind::viterbi: return one();
    case SemiringKind::real: return make_x(std::numeric_limits<double>::infinity());
    case SemiringKind::counting: {
      if (!counting_has_infinity_) throw UnsupportedOperation("counting without infinity");
      Weight w;
      w.kind = kind_;
      w.n = kInfiniteCount;
      return w;
    }
  }
  return zero();
}

Weight Semiring::plus(const Weight& a, const Weight& b) const {
  check(a);
  check(b);
  switch (kind_) {
    case SemiringKind::boolean: return make_x((a.x != 0.0 || b.x != 0.0) ? 1.0 : 0.0);
    case SemiringKind::real: return make_x(a.x + b.x);
    case SemiringKind::viterbi: return make_x(std::max(a.x, b.x));
    case SemiringKind::counting: {
      if (a.n == kInfiniteCount || b.n == kInfiniteCount) return infinity();
      std::uint64_t s = a.n + b.n;
      if (s < a.n) return from_count(kInfiniteCount);
      return from_count(s);
    }
  }
  return zero();
}

Weight Semiring::times(const Weight& a, const Weight& b) const {
  check(a);
  check(b);
  switch (kind_) {
    case SemiringKind::boolean: return make_x((a.x != 0.0 && b.x != 0.0) ? 1.0 : 0.0);
    case SemiringKind::real:
      // IEEE gives NaN for 0 * inf; zero must stay absorbing.
      if (a.x == 0.0 || b.x == 0.0) return zero();
      return make_x(a.x * b.x);
    case SemiringKind::viterbi: return make_x(a.x * b.x);
    case SemiringKind::counting: {
      if (a.n == 0 || b.n == 0) return zero();
      if (a.n == kInfiniteCount || b.n == kInfiniteCount) return infinity();
      if (a.n > cap_ / b.n) return from_count(kInfiniteCount);
      return from_count(a.n * b.n);
    }
  }
  return zero();
}

Weight Semiring::star(const Weight& a) const {
  check(a);
  if (!is_omega_continuous()) {
    throw UnsupportedOperation("star requires an omega-continuous semiring");
  }
  switch (kind_) {
    case SemiringKind::boolean: return one();
    case SemiringKind::viterbi: return one();
    case SemiringKind::real:
      if (a.x >= 1.0) return infinity();
      return make_x(1.0 / (1.0 - a.x));
    case SemiringKind::counting: return a.n == 0 ? one() : infinity();
  }
  return one();
}

bool Semiring::is_idempotent() const {
  return kind_ == SemiringKind::boolean || kind_ == SemiringKind::viterbi;
}

bool Semiring::is_omega_continuous() const {
  return kind_ != SemiringKind::counting || counting_has_infinity_;
}

bool Semiring::is_zero(const Weight& a) const {
  check(a);
  return kind_ == SemiringKind::counting ? a.n == 0 : a.x == 0.0;
}

bool Semiring::is_infinite(const Weight& a) const {
  check(a);
  if (kind_ == SemiringKind::counting) return a.n == kInfiniteCount;
  if (kind_ == SemiringKind::real) return std::isinf(a.x);
  return false;
}

bool Semiring::leq(const Weight& a, const Weight& b) const {
  check(a);
  check(b);
  return kind_ == SemiringKind::counting ? a.n <= b.n : a.x <= b.x;
}

bool Semiring::approx_eq(const Weight& a, const Weight& b, double tol) const {
  check(a);
  check(b);
  switch (kind_) {
    case SemiringKind::boolean: return a.x == b.x;
    case SemiringKind::counting: return a.n == b.n;
    case SemiringKind::real:
    case SemiringKind::viterbi: {
      if (a.x == b.x) return true;
      if (std::isinf(a.x) || std::isinf(b.x)) return false;
      double scale = std::max({1.0, std::fabs(a.x), std::fabs(b.x)});
      return std::fabs(a.x - b.x) <= tol * scale;
    }
  }
  return false;
}

Weight Semiring::from_double(double v) const {
  if (std::isnan(v) || v < 0.0) {
    throw InputError("weight must be a nonnegative number");
  }
  switch (kind_) {
    case SemiringKind::boolean:
    case SemiringKind::counting:
      if (v == 0.0) return zero();
      if (v == 1.0) return one();
      throw InputError("the " + std::string(name()) +
                       " semiring accepts only weights 0.0 and 1.0");
    case SemiringKind::viterbi:
      if (v > 1.0) throw InputError("Viterbi weights must lie in [0,1]");
      return make_x(v);
    case SemiringKind::real: return make_x(v);
  }
  return zero();
}

double Semiring::to_double(const Weight& a) const {
  check(a);
  if (kind_ == SemiringKind::counting) {
    if (a.n == kInfiniteCount) return std::numeric_limits<double>::infinity();
    return static_cast<double>(a.n);
  }
  return a.x;
}

std::string Semiring::format(const Weight& a) const {
  check(a);
  switch (kind_) {
    case SemiringKind::boolean: return a.x != 0.0 ? "true" : "false";
    case SemiringKind::counting:
      return a.n == kInfiniteCount ? "inf" : std::to_string(a.n);
    case SemiringKind::real:
    case SemiringKind::viterbi: {
      if (std::isinf(a.x)) return "inf";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", a.x);
      return buf;
    }
  }
  return "?";
}

}  // namespace tlw
