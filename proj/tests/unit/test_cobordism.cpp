/**
 * @file test_cobordism.cpp
 * @brief Clip maps, Gaussian elimination, cabling and the braid action.
 */
#include "doctest.h"
#include "qakh/cobordism.hpp"
#include "qakh/tqft.hpp"

using namespace qakh;

namespace {

int rank_of(const SparseMatrix<Scalar>& m, const RingSpec& r) { return field_rank(m, r); }

/// Every induced map on homology is an isomorphism.
bool quasi_iso(const ChainMap& f, const RingSpec& r) {
    const auto hs = homology_basis(specialize(f.source, r));
    const auto ht = homology_basis(specialize(f.target, r));
    for (int i = f.source.min_degree(); i <= f.source.max_degree(); ++i)
        if (hs.dim(i) != ht.dim(i + f.ideg)) return false;
    for (int i = f.target.min_degree(); i <= f.target.max_degree(); ++i)
        if (ht.dim(i) != hs.dim(i - f.ideg)) return false;
    for (const auto& [i, reps] : hs.reps) {
        if (!hs.dim(i)) continue;
        if (rank_of(induced_map(f, i, hs, ht), r) != hs.dim(i)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("R1 and R2 clips are chain maps and quasi-isomorphisms") {
    const auto r = RingSpec::prime_field(5, 2);
    struct Case {
        const char* word;
        int strands;
        MovieClip clip;
    };
    const std::vector<Case> cases{
        {"p1 p1", 2, {ClipKind::R2, 0, 1, 1, false}},
        {"p1 n1 p1 p1", 2, {ClipKind::R2, 0, 1, 1, true}},
        {"p1 p1 p1", 2, {ClipKind::R2, 1, 1, -1, false}},
        {"p1 p1", 2, {ClipKind::R1, 1, 1, 1, false}},
        {"p1 p1", 2, {ClipKind::R1, 1, 2, -1, false}},
        {"p1 p2 p1", 3, {ClipKind::R2, 1, 2, 1, false}},
    };
    for (const auto& c : cases) {
        const auto w = parse_word(c.word, c.strands);
        const auto f = clip_map(w, c.clip);
        std::string why;
        CHECK_MESSAGE(verify_chain_map(f, &why), c.word << " " << c.clip.describe() << ": " << why);
        CHECK_MESSAGE(quasi_iso(f, r), c.word << " " << c.clip.describe());
        CHECK(homology(f.source, r).same_groups(homology(build_complex(w), r)));
        CHECK(homology(f.target, r).same_groups(homology(build_complex(apply_clip(w, c.clip)), r)));
    }
}

TEST_CASE("surgery clips") {
    const std::vector<std::pair<const char*, MovieClip>> cases{
        {"p1 p1", {ClipKind::Cup, 1, 1, 1, false}},
        {"p1 u1 a1 p1", {ClipKind::Cap, 1, 1, 1, false}},
        {"v1 p1", {ClipKind::Saddle, 0, 1, 1, false}},
        {"h1 p1", {ClipKind::Saddle, 0, 1, 1, false}},
    };
    for (const auto& [text, clip] : cases) {
        const auto f = clip_map(parse_word(text, 2), clip);
        std::string why;
        CHECK_MESSAGE(verify_chain_map(f, &why), text << ": " << why);
        // saddles also pick up the change of the normalization shift
        if (clip.kind != ClipKind::Saddle) CHECK(f.jdeg == clip_degree(clip).value());
    }
    CHECK_THROWS(clip_map(parse_word("p1 p1", 2), {ClipKind::R3, 0, 1, 1, false}));
}

TEST_CASE("clip degrees") {
    CHECK(clip_degree({ClipKind::Saddle}).value() == -1);
    CHECK(clip_degree({ClipKind::Cup}).value() == 1);
    CHECK(clip_degree({ClipKind::Cap}).value() == 1);
    CHECK(clip_degree({ClipKind::R1}).value() == 0);
    CHECK(clip_degree({ClipKind::R2}).value() == 0);
}

TEST_CASE("composition of clips") {
    const auto w = parse_word("p1 p1", 2);
    const MovieClip ins{ClipKind::R2, 0, 1, 1, false};
    const auto f = clip_map(w, ins);
    const auto w2 = apply_clip(w, ins);
    const auto g = clip_map(w2, {ClipKind::R2, 0, 1, 1, true});
    const auto gf = compose(g, f);
    CHECK(verify_chain_map(gf));
    const auto r = RingSpec::prime_field(5, 2);
    CHECK(quasi_iso(gf, r));
}

TEST_CASE("gaussian elimination keeps homology") {
    const auto c = build_complex(parse_word("p1 n1", 2));
    const auto red = gaussian_eliminate(c, [](int, int) { return false; });
    const auto r = RingSpec::rationals(3);
    CHECK(homology(red.complex, r).same_groups(homology(c, r)));
    CHECK(red.complex.total_dim() <= c.total_dim());
    for (const auto& [i, p] : red.pi) {
        const auto pi_iota = mat_mul(p, red.iota.at(i), kPolyOps);
        CHECK(pi_iota == identity_matrix(red.complex.dim(i), LaurentPoly(1), kPolyOps));
    }
}

TEST_CASE("cables") {
    const auto w = parse_word("u2 p1 a2", 1);
    const auto c = cable(w, 2, {1, 1});
    CHECK(c.word.to_string() == parse_word("u3 u4 p2 p3 p1 p2 a4 a3", 2).to_string());
    CHECK(c.writhe == 1);
    CHECK(writhe(c.word) == 4);
    const auto f = cable(w, 2, {1, -1});
    CHECK(f.hshift() == 2);
    CHECK(f.qshift() == 6);
    CHECK(writhe(cable(w, 3, {1, 1, 1}).word) == 9);
}

TEST_CASE("braid action on the trivial 2-cable") {
    const auto r = RingSpec::f4();
    const auto id = parse_word("", 1);
    const auto sp = tangle_action(id, parse_word("p1", 2), r);
    const auto sn = tangle_action(id, parse_word("n1", 2), r);
    CHECK(sp.dim() == 4);
    const auto a = action_in_tensor_basis(sp), b = action_in_tensor_basis(sn);
    CHECK(mat_mul(a, b, r) == identity_matrix(4, r.from_int(1), r));
    const auto spp = tangle_action(id, parse_word("p1 p1", 2), r);
    CHECK(action_in_tensor_basis(spp) == mat_mul(a, a, r));
    std::string why;
    CHECK_MESSAGE(commutes_with_uq(sp, &why), why);
    CHECK(skein_check(id, r).holds);
    CHECK_THROWS(tangle_action(id, parse_word("p1", 2), RingSpec::prime_field(5, 2)));
}

TEST_CASE("twisted skein") {
    const auto r = RingSpec::f4();
    for (int t : {1, -1}) {
        const auto rep = skein_check_twisted(t, r);
        CHECK_MESSAGE(rep.holds, t << ": " << rep.note);
    }
}
