/**
 * @file test_coeff.cpp
 * @brief Laurent polynomials and ring specializations.
 */
#include <random>

#include "doctest.h"
#include "qakh/coeff.hpp"

using namespace qakh;

namespace {

LaurentPoly random_poly(std::mt19937& rng) {
    LaurentPoly p;
    const int terms = rng() % 4;
    for (int t = 0; t < terms; ++t) p += LaurentPoly::monomial(static_cast<int>(rng() % 9) - 4, static_cast<long>(rng() % 11) - 5);
    return p;
}

std::vector<RingSpec> rings() {
    return {RingSpec::integers(1), RingSpec::integers(-1), RingSpec::rationals(3), RingSpec::rationals(BigRat(2, 5)),
            RingSpec::prime_field(5, 2), RingSpec::prime_field(7, 3), RingSpec::f4(2), RingSpec::f4(3)};
}

}  // namespace

TEST_CASE("laurent arithmetic") {
    const auto q = LaurentPoly::q();
    const auto qi = LaurentPoly::q(-1);
    CHECK(q * qi == LaurentPoly(1));
    CHECK((q + qi) * (q - qi) == LaurentPoly::q(2) - LaurentPoly::q(-2));
    CHECK((q + qi).bar() == q + qi);
    CHECK(LaurentPoly::q(3).shifted(-5) == LaurentPoly::q(-2));
    CHECK((q - q).is_zero());
    CHECK(LaurentPoly::from_json((q + LaurentPoly(7) * qi).to_json()) == q + LaurentPoly(7) * qi);
    CHECK((LaurentPoly(2) * q - LaurentPoly(3)).min_exp() == 0);
}

TEST_CASE("specialize is a ring homomorphism") {
    std::mt19937 rng(7);
    for (const auto& r : rings()) {
        for (int s = 0; s < 200; ++s) {
            const auto a = random_poly(rng), b = random_poly(rng);
            CHECK(specialize(a * b, r) == r.mul(specialize(a, r), specialize(b, r)));
            CHECK(specialize(a + b, r) == r.add(specialize(a, r), specialize(b, r)));
        }
        CHECK(r.mul(specialize(LaurentPoly::q(), r), specialize(LaurentPoly::q(-1), r)) == r.from_int(1));
    }
}

TEST_CASE("F4 field tables") {
    for (int a = 1; a < 4; ++a) {
        CHECK(f4::mul(a, f4::inv(a)) == 1);
        CHECK(f4::add(a, a) == 0);
    }
    CHECK(f4::mul(2, 2) == 3);  // w^2
    CHECK(f4::add(2, 1) == 3);  // w + 1 = w^2
    const auto r = RingSpec::f4();
    CHECK(r.characteristic() == 2);
    CHECK(r.format(r.pow_q(2)) == "w^2");
    CHECK(r.is_zero(r.add(r.add(r.pow_q(2), r.q()), r.from_int(1))));  // w^2 + w + 1 = 0
}

TEST_CASE("ring parsing and errors") {
    CHECK(RingSpec::parse("F5", "2").name() == "F5");
    CHECK(RingSpec::parse("Q", "1/2").q() == BigRat(1, 2));
    CHECK(RingSpec::parse("F4", "w").characteristic() == 2);
    CHECK_THROWS_AS(RingSpec::parse("F6", "1"), RingError);
    CHECK_THROWS_AS(RingSpec::parse("F5", "0"), RingError);
    CHECK_THROWS_AS(RingSpec::parse("Q", "0"), RingError);
    CHECK_THROWS_AS(RingSpec::parse("Z", "2"), RingError);
    CHECK_THROWS_AS(RingSpec::parse("R", "1"), RingError);
    CHECK(RingSpec::parse("F7", "10").q() == 3);
}
