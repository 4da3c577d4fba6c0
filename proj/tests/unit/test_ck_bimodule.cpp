/**
 * @file test_ck_bimodule.cpp
 * @brief CK bimodules, saddle maps and the bimodule cube complex.
 */
#include "doctest.h"
#include "qakh/ck_bimodule.hpp"
#include "qakh/corpus.hpp"
#include "qakh/hochschild.hpp"
#include "qakh/tqft.hpp"

using namespace qakh;

TEST_CASE("bimodule axioms on corpus resolutions") {
    int checked = 0;
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 3 || w.bottom > 2) continue;
        const int m = w.crossing_count();
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            CKBimodule b(FlatTangle::from_word(w, mask_bits(mask, m)));
            std::string why;
            CHECK_MESSAGE(b.verify_bimodule(&why), e.name << " " << mask << ": " << why);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("saddles are bimodule maps and d^2 = 0") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 4) continue;
        const auto ck = ck_complex(w);
        for (const auto& edge : ck.edges) {
            std::string why;
            CHECK_MESSAGE(is_bimodule_map(edge.map, *ck.vertices[edge.from], *ck.vertices[edge.from | (1u << edge.bit)], &why),
                          e.name << ": " << why);
        }
        std::string why;
        CHECK_MESSAGE(verify_complex(ck.complex(), &why), e.name << ": " << why);
    }
}

TEST_CASE("tensor products match composites") {
    const auto r = RingSpec::prime_field(5, 2);
    const auto cup = FlatTangle::from_matching(0, 2, {1, 0});
    const auto cap = FlatTangle::from_matching(2, 0, {1, 0});
    const auto id2 = FlatTangle::identity(2);
    CHECK(tensor_check(CKBimodule(id2), CKBimodule(id2), r).isomorphism());
    CHECK(tensor_check(CKBimodule(cap), CKBimodule(cup), r).isomorphism());
    CHECK(tensor_check(CKBimodule(cup), CKBimodule(cap), r).isomorphism());
}

TEST_CASE("weights and annular degree agree") {
    // the k-grading of the coinvariant pipeline is the weight of the CK generators
    const auto r = RingSpec::prime_field(7, 3);
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 3) continue;
        const auto a = homology(build_complex(w), r);
        const auto b = qhh_annular(w, r);
        std::map<int, long> ka, kb;
        for (const auto& [key, c] : a.cells) ka[key[2]] += c.rank;
        for (const auto& [key, c] : b.cells) kb[key[2]] += c.rank;
        CHECK_MESSAGE(ka == kb, e.name);
    }
}

TEST_CASE("identity bimodule is the regular bimodule") {
    for (int n = 0; n <= 3; ++n) CHECK(CKBimodule(FlatTangle::identity(n)).size() == arc_algebra(n).dimension());
}
