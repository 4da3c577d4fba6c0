/**
 * @file test_tangle.cpp
 * @brief Word grammar, resolutions, canonicalization and the cube.
 */
#include "doctest.h"
#include "qakh/corpus.hpp"
#include "qakh/tangle.hpp"

using namespace qakh;

TEST_CASE("parse examples") {
    const auto p = parse_word("p1", 2);
    CHECK(p.bottom == 2);
    CHECK(p.crossing_count() == 1);
    const auto t = parse_word("torus 2 5");
    CHECK(t.bottom == 2);
    CHECK(t.crossing_count() == 5);
    CHECK(t == parse_word("n1 n1 n1 n1 n1", 2));
    const auto uc = parse_word("u1 a1", 1);
    CHECK(uc.widths() == std::vector<int>{1, 3, 1});
    CHECK(parse_word(p.to_string()) == p);
    CHECK(parse_word("strands: 3\norient: +-+\np1 p1 p2 p2").bottom_orient == std::vector<int>{1, -1, 1});
}

TEST_CASE("parse errors carry a kind") {
    auto kind = [](const std::string& text, int strands) {
        try {
            parse_word(text, strands);
        } catch (const ParseError& e) {
            return static_cast<int>(e.kind);
        }
        return -1;
    };
    CHECK(kind("p1 q2", 2) == static_cast<int>(ParseError::Kind::MalformedToken));
    CHECK(kind("p3", 2) == static_cast<int>(ParseError::Kind::WidthViolation));
    CHECK(kind("a1", 1) == static_cast<int>(ParseError::Kind::WidthViolation));
    CHECK_THROWS_AS(validate_word(parse_word("u1", 1), true), ParseError);
}

TEST_CASE("crossing counts") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        const auto s = crossing_signs(w);
        int np = 0, nm = 0;
        for (int x : s) (x > 0 ? np : nm)++;
        CHECK(np + nm == w.crossing_count());
        CHECK(writhe(w) == np - nm);
    }
    const auto s = crossing_signs(parse_word("torus 2 3"));
    CHECK(s == std::vector<int>{-1, -1, -1});
}

TEST_CASE("resolve examples") {
    const auto id = resolve(parse_word("", 1), {});
    CHECK(id.essential_count == 1);
    CHECK(id.trivial_circles.empty());

    const auto n1 = parse_word("n1", 2);
    const auto r0 = resolve(n1, {0}), r1 = resolve(n1, {1});
    const int e0 = r0.essential_count, e1 = r1.essential_count;
    CHECK(std::min(e0, e1) == 0);
    CHECK(std::max(e0, e1) == 2);
    const auto& turn = e0 == 0 ? r0 : r1;
    CHECK(turn.trivial_circles.size() == 1);

    const auto uc = resolve(parse_word("u1 a1", 1), {});
    CHECK(uc.essential_count == 1);
    CHECK(uc.trivial_circles.size() == 1);
}

TEST_CASE("seam parity and essential count") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        const int m = w.crossing_count();
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            const auto xi = mask_bits(mask, m);
            const auto raw = raw_curves(w, xi);
            int total = 0;
            for (const auto& c : raw.circles) total += static_cast<int>(c.seam_sign.size());
            CHECK(total % 2 == w.bottom % 2);
            const auto cfg = resolve(w, xi);
            for (const auto& c : cfg.canonical_raw.circles) CHECK(c.seam_sign.size() <= 1);
            int alg = 0;
            for (const auto& c : raw.circles) alg += std::abs(c.algebraic());
            CHECK(cfg.essential_count == alg);
        }
    }
}

TEST_CASE("canonicalization is idempotent and confluent") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        const int m = w.crossing_count();
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            const auto raw = raw_curves(w, mask_bits(mask, m));
            const auto cfg = canonicalize(raw);
            CHECK(canonicalize(cfg.canonical_raw).transcript.is_identity());
            if (cfg.transcript.steps.size() <= 2) {
                const auto all = canonicalize_all_orders(raw);
                CHECK(all.size() == 1);
            }
        }
    }
}

TEST_CASE("cube combinatorics") {
    const auto c0 = build_cube(parse_word("", 2));
    CHECK(c0.vertices.size() == 1);
    CHECK(c0.edges.empty());

    const auto c2 = build_cube(parse_word("p1 p1", 2));
    CHECK(c2.vertices.size() == 4);
    CHECK(c2.edges.size() == 4);
    int squares = 0;
    CHECK(squares_anticommute(c2, &squares));
    CHECK(squares == 1);

    const auto c5 = build_cube(parse_word("torus 2 5"));
    CHECK(c5.vertices.size() == 32);
    CHECK(c5.edges.size() == 80);
    CHECK(squares_anticommute(c5, &squares));
    CHECK(squares == 80);
    CHECK(c5.n_minus == 5);
}

TEST_CASE("rotation") {
    for (const auto& e : corpus()) {
        const auto w = e.word();
        const int L = static_cast<int>(w.slices.size());
        CHECK(rotate_closure(w, 0) == w);
        CHECK(rotate_closure(w, L) == w);
        if (L < 2) continue;
        // a full turn may make cup orientations explicit, nothing else changes
        const auto back = rotate_closure(rotate_closure(w, 1), L - 1);
        CHECK(back.bottom == w.bottom);
        CHECK(back.bottom_orient == w.bottom_orient);
        REQUIRE(back.slices.size() == w.slices.size());
        for (int s = 0; s < L; ++s) {
            CHECK(back.slices[s].kind == w.slices[s].kind);
            CHECK(back.slices[s].pos == w.slices[s].pos);
        }
    }
    const auto w = parse_word("strands: 2 orient: +- n1 a1 u1");
    CHECK(!(rotate_closure(w, 1) == w));
}
