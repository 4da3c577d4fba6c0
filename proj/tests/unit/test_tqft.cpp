/**
 * @file test_tqft.cpp
 * @brief The annular TQFT pipeline: complexes, surgeries, U_q(sl2), Viro cones.
 */
#include "doctest.h"
#include "qakh/classical.hpp"
#include "qakh/corpus.hpp"
#include "qakh/tqft.hpp"

using namespace qakh;

namespace {
using Mat = SparseMatrix<LaurentPoly>;
const auto kQ = LaurentPoly::q(1);
const auto kQi = LaurentPoly::q(-1);
}  // namespace

TEST_CASE("d^2 = 0 on the corpus") {
    for (const auto& e : corpus()) {
        std::string why;
        CHECK_MESSAGE(verify_complex(build_complex(e.word()), &why), e.name << ": " << why);
    }
    for (const auto& e : mobius_corpus()) {
        std::string why;
        CHECK_MESSAGE(verify_complex(mobius_build_complex(e.word()), &why), e.name << ": " << why);
    }
}

TEST_CASE("state spaces") {
    AnnularCurveConfig cfg;
    cfg.essential_count = 2;
    cfg.trivial_circles.push_back({0});
    const auto gens = state_space(cfg);
    CHECK(gens.size() == 8);
    int ksum = 0;
    for (const auto& g : gens) ksum += g.k;
    CHECK(ksum == 0);
}

TEST_CASE("unknot and the empty word") {
    const auto h = homology(build_complex(parse_word("", 1)), RingSpec::integers());
    CHECK(h.total_rank() == 2);
    CHECK(h.rank(0, 0, 1) == 1);
    CHECK(h.rank(0, 0, -1) == 1);
    const auto t = homology(build_complex(parse_word("u1 a1", 1)), RingSpec::rationals(3));
    CHECK(t.total_rank() == 4);
}

TEST_CASE("core surgeries at q = 1 are the classical tables") {
    const auto r = RingSpec::rationals(1);
    // merge of two trivial circles: w+w+ -> w+, w+w- and w-w+ -> w-, w-w- -> 0
    const auto m = specialize(core_surgery(CoreSurgery::MergeWW), r);
    CHECK(m.get(0, 0) == 1);
    CHECK(m.get(1, 1) == 1);
    CHECK(m.get(1, 2) == 1);
    CHECK(m.row(0).size() == 1);
    CHECK(m.get(0, 3) == 0);
    CHECK(m.get(1, 3) == 0);
    const auto s = specialize(core_surgery(CoreSurgery::SplitWW), r);
    CHECK(s.get(1, 0) == 1);
    CHECK(s.get(2, 0) == 1);
    CHECK(s.get(3, 1) == 1);
}

TEST_CASE("ev, coev, zigzags") {
    const auto ev = ev_matrix();
    CHECK(ev.get(0, 2) == LaurentPoly(1));
    CHECK(ev.get(0, 1) == kQ);
    auto [l, r] = zigzags();
    CHECK(l == identity_matrix(2, LaurentPoly(1), kPolyOps));
    CHECK(r == identity_matrix(2, LaurentPoly(1), kPolyOps));
    CHECK(torus_eval_check() == kQ + kQi);
}

TEST_CASE("U_q(sl2) relations over Z[q, q^-1]") {
    for (int n = 0; n <= 3; ++n) {
        const auto E = uqsl2_operator('E', n), F = uqsl2_operator('F', n);
        const auto K = uqsl2_operator('K', n), Ki = uqsl2_operator('k', n);
        const auto one = identity_matrix(1 << n, LaurentPoly(1), kPolyOps);
        CHECK(mat_mul(K, Ki, kPolyOps) == one);
        CHECK(mat_mul(mat_mul(K, E, kPolyOps), Ki, kPolyOps) == E.scaled(LaurentPoly::q(2), kPolyOps));
        CHECK(mat_mul(mat_mul(K, F, kPolyOps), Ki, kPolyOps) == F.scaled(LaurentPoly::q(-2), kPolyOps));
        const auto comm = mat_add(mat_mul(E, F, kPolyOps), mat_mul(F, E, kPolyOps).scaled(LaurentPoly(-1), kPolyOps), kPolyOps);
        CHECK(comm.scaled(kQ - kQi, kPolyOps) == mat_add(K, Ki.scaled(LaurentPoly(-1), kPolyOps), kPolyOps));
    }
}

TEST_CASE("U_q(sl2) commutes with differentials on the corpus") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 4) continue;
        const auto c = build_complex(w);
        for (char g : {'E', 'F', 'K'}) {
            const auto A = complex_uq_action(w, g);
            for (const auto& [i, d] : c.d)
                CHECK_MESSAGE(mat_mul(d, A.at(i), kPolyOps) == mat_mul(A.at(i + 1), d, kPolyOps), e.name << " " << g);
        }
    }
}

TEST_CASE("annular grading is symmetric") {
    for (const auto& e : corpus()) {
        const auto h = homology(build_complex(e.word()), RingSpec::prime_field(7, 3));
        for (const auto& [key, c] : h.cells) CHECK(h.rank(key[0], key[1], -key[2]) == c.rank);
    }
}

TEST_CASE("Viro cones") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (w.crossing_count() > 4) continue;
        const auto s = crossing_signs(w);
        for (int c = 0; c < static_cast<int>(s.size()); ++c) {
            if (s[c] < 0) continue;
            std::string why;
            CHECK_MESSAGE(viro_check(w, c, &why), e.name << " " << c << ": " << why);
        }
    }
}

TEST_CASE("q = 1 reproduces the classical functors") {
    const auto r = RingSpec::rationals(1);
    for (const auto& e : corpus())
        CHECK(homology(build_complex(e.word()), r).same_groups(homology(classical_aps_complex(e.word()), r)));
    for (const auto& e : mobius_corpus())
        CHECK(homology(mobius_build_complex(e.word()), r).same_groups(homology(classical_mobius_complex(e.word()), r)));
}

TEST_CASE("Mobius closure needs two strands") {
    CHECK_THROWS(mobius_build_complex(parse_word("p1 p2", 3)));
}
