#include <random>

#include "checks.hpp"
#include "doctest.h"
#include "tlw/errors.hpp"
#include "tlw/semiring.hpp"

using namespace tlw;

TEST_CASE("semiring axioms hold on sampled triples") {
  for (const Semiring& sr :
       {Semiring::boolean(), Semiring::counting(), Semiring::real(), Semiring::viterbi()}) {
    CAPTURE(sr.name());
    CHECK(testing::axiom_violations(sr, 10000, 20240601u) == 0);
  }
}

TEST_CASE("identities and basic arithmetic") {
  Semiring real = Semiring::real();
  CHECK(real.to_double(real.plus(real.from_double(0.25), real.from_double(0.5))) == 0.75);
  CHECK(real.to_double(real.times(real.from_double(0.25), real.from_double(0.5))) == 0.125);

  Semiring vit = Semiring::viterbi();
  CHECK(vit.to_double(vit.plus(vit.from_double(0.25), vit.from_double(0.5))) == 0.5);
  CHECK(vit.is_idempotent());
  CHECK_FALSE(real.is_idempotent());

  Semiring b = Semiring::boolean();
  CHECK(b.is_zero(b.times(b.one(), b.zero())));
  CHECK_FALSE(b.is_zero(b.plus(b.one(), b.zero())));

  Semiring c = Semiring::counting();
  CHECK(c.format(c.plus(c.from_count(3), c.from_count(4))) == "7");
  CHECK(c.format(c.times(c.from_count(3), c.from_count(4))) == "12");
}

TEST_CASE("star is the least solution of w = 1 + a w") {
  Semiring real = Semiring::real();
  CHECK(real.to_double(real.star(real.from_double(0.5))) == doctest::Approx(2.0));
  CHECK(real.is_infinite(real.star(real.one())));
  Semiring b = Semiring::boolean();
  CHECK_FALSE(b.is_zero(b.star(b.zero())));
  Semiring c = Semiring::counting();
  CHECK(c.format(c.star(c.zero())) == "1");
  CHECK(c.is_infinite(c.star(c.one())));
}

TEST_CASE("counting saturates at infinity") {
  Semiring c = Semiring::counting();
  Weight big = c.from_count(std::uint64_t{1} << 40);
  CHECK(c.is_infinite(c.times(big, big)));
  CHECK(c.is_infinite(c.plus(c.infinity(), c.one())));
  CHECK(c.is_zero(c.times(c.infinity(), c.zero())));
}

TEST_CASE("literals are checked per semiring") {
  CHECK_THROWS(Semiring::counting().from_double(0.5));
  CHECK_THROWS(Semiring::boolean().from_double(2.0));
  CHECK_THROWS(Semiring::viterbi().from_double(1.5));
  CHECK_THROWS(Semiring::real().from_double(-1.0));
  CHECK(Semiring::counting().format(Semiring::counting().from_double(1.0)) == "1");
}

TEST_CASE("weights from another instance are rejected") {
  Semiring real = Semiring::real();
  CHECK_THROWS_AS(real.check(Semiring::counting().one()), TypeError);
}

TEST_CASE("approximate equality is relative") {
  Semiring real = Semiring::real();
  CHECK(real.approx_eq(real.from_double(1e6), real.from_double(1e6 + 1e-7)));
  CHECK_FALSE(real.approx_eq(real.from_double(1.0), real.from_double(1.0 + 1e-9)));
  CHECK(real.approx_eq(real.from_double(1.0), real.from_double(1.0 + 1e-9), 1e-8));
}

TEST_CASE("format uses twelve significant digits") {
  Semiring real = Semiring::real();
  CHECK(real.format(real.from_double(2.0 / 3.0)) == "0.666666666667");
  CHECK(Semiring::boolean().format(Semiring::boolean().one()) == "true");
  CHECK(Semiring::from_name("viterbi").kind() == SemiringKind::viterbi);
  CHECK_THROWS(Semiring::from_name("tropical"));
}
