/**
 * @file test_hochschild.cpp
 * @brief Quantum coinvariants, the coinvariant pipeline and truncated bar complexes.
 */
#include "doctest.h"
#include "qakh/corpus.hpp"
#include "qakh/hochschild.hpp"
#include "qakh/tqft.hpp"

using namespace qakh;

namespace {
std::vector<RingSpec> rings() { return {RingSpec::rationals(1), RingSpec::prime_field(5, 2), RingSpec::prime_field(7, 3)}; }
}  // namespace

TEST_CASE("coinvariant ranks") {
    for (const auto& r : rings()) {
        for (int n = 0; n <= 3; ++n) {
            CHECK(coinv_q(CKBimodule(FlatTangle::identity(n)), false, r).dim() == (1 << n));
            CHECK(idempotents_span_coinvariants(n, false, r));
        }
        for (int n = 0; n <= 2; ++n) {
            CHECK(coinv_q(CKBimodule(FlatTangle::identity(2 * n)), true, r).dim() == (1 << n));
            CHECK(idempotents_span_coinvariants(2 * n, true, r));
        }
    }
}

TEST_CASE("projection kills relations") {
    const auto r = RingSpec::prime_field(5, 2);
    for (const auto& t : {FlatTangle::identity(2), FlatTangle::from_matching(2, 2, {1, 0, 3, 2})}) {
        for (bool tw : {false, true}) {
            CKBimodule b(t);
            const auto p = coinv_q(b, tw, r);
            for (const auto& rel : coinvariant_relations(b, tw, r))
                for (const auto& x : p.project(rel)) CHECK(r.is_zero(x));
        }
    }
}

TEST_CASE("integers are rejected") {
    CHECK_THROWS_AS(coinv_q(CKBimodule(FlatTangle::identity(1)), false, RingSpec::integers()), RingError);
}

TEST_CASE("pipeline equivalence") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 4) continue;
        for (const auto& r : rings()) CHECK_MESSAGE(homology(build_complex(w), r).same_groups(qhh_annular(w, r)), e.name << " " << r.name());
    }
    const auto r = RingSpec::prime_field(5, 2);
    for (const auto& e : mobius_corpus())
        CHECK_MESSAGE(homology(mobius_build_complex(e.word()), r).same_groups(qhh_mobius(e.word(), r)), e.name);
}

TEST_CASE("truncated qHH vanishes above degree 0") {
    for (int n = 0; n <= 2; ++n) {
        const auto h = qhh_truncated(n, false, RingSpec::prime_field(5, 2), 3);
        CHECK(h.homology.at(0) == (1 << n));
        CHECK(h.homology.at(1) == 0);
        CHECK(h.homology.at(2) == 0);
    }
    const auto t = qhh_truncated(2, true, RingSpec::prime_field(5, 2), 2);
    CHECK(t.homology.at(0) == 2);
    CHECK(t.homology.at(1) == 0);
}

TEST_CASE("face identities") {
    std::string why;
    CHECK(face_identities(2, false, RingSpec::prime_field(5, 2), 4, 50, 1, &why));
    CHECK(face_identities(2, true, RingSpec::prime_field(5, 2), 4, 50, 2, &why));
    CHECK(face_identities(3, false, RingSpec::prime_field(7, 3), 3, 50, 3, &why));
}

TEST_CASE("canonical basis map") {
    for (int n = 0; n <= 3; ++n) {
        const auto d = determinant(canonical_basis_map(n));
        CHECK(d.is_monomial());
        const auto& [e, c] = *d.terms().begin();
        (void)e;
        CHECK(abs(c) == 1);
    }
    const auto m = canonical_basis_map(2);
    const auto ds = enumerate_cup_diagrams(2);
    for (int c = 0; c < 4; ++c) {
        if (ds[c].notation() != "10") continue;
        CHECK(m.get(1, c) == LaurentPoly(1));
        CHECK(m.get(2, c) == LaurentPoly::q(-1));
    }
}
