/**
 * @file test_arc_algebra.cpp
 * @brief Cup diagrams, closures and the arc algebras H^n.
 */
#include <random>

#include "doctest.h"
#include "qakh/arc_algebra.hpp"
#include "qakh/ck_bimodule.hpp"

using namespace qakh;

TEST_CASE("cup diagram codes") {
    for (int n = 0; n <= 4; ++n) {
        const auto ds = enumerate_cup_diagrams(n);
        CHECK(ds.size() == (1u << n));  // every binary code is a diagram
        for (const auto& d : ds) {
            CHECK(CupDiagram::parse(d.code()) == d);
            CHECK(CupDiagram::parse(d.notation()) == d);
            CHECK(d.reflected().reflected() == d);
            CHECK(d.reflected().weight() == -d.weight());
        }
    }
    CHECK(CupDiagram::from_code("10").notation() == "10");
    CHECK(CupDiagram::from_code("01").weight() == 0);
    CHECK(CupDiagram::from_code("11").weight() == 2);
}

TEST_CASE("arc algebra dimensions") {
    // frozen from the construction; n = 2 has seven generators, five of weight 0
    const int dims[] = {1, 2, 7, 20, 75};
    for (int n = 0; n <= 4; ++n) CHECK(arc_algebra(n).dimension() == dims[n]);
    CHECK(arc_algebra(2).dimension(0) == 5);
    CHECK(arc_algebra(3).dimension(1) == 9);
}

TEST_CASE("worked products and degrees") {
    const auto& A = arc_algebra(2);
    const int x = A.find("01", "10"), y = A.find("10", "01");
    CHECK(A.degree(x) == -1);
    CHECK(A.degree(y) == -1);
    CHECK(A.multiply(A.basis_element(x), A.basis_element(y)) == A.basis_element(A.find("10", "10", 1)));
    CHECK(A.multiply(A.basis_element(y), A.basis_element(x)).empty());
    CHECK(A.degree(A.find("10", "10", 1)) == -2);
    const int d1 = closure_degree(FlatTangle::identity(6), CupDiagram::from_code("101001"), CupDiagram::from_code("011010"));
    CHECK(d1 - 2 == -4);  // one dot
    const auto t = FlatTangle::from_matching(4, 2, {4, 2, 1, 5, 0, 3}, 1);
    CHECK(closure_degree(t, CupDiagram::from_code("1001"), CupDiagram::from_code("01")) == 1);
}

TEST_CASE("algebra axioms") {
    for (int n = 0; n <= 3; ++n) {
        const auto& A = arc_algebra(n);
        const auto one = A.unit();
        for (int i = 0; i < A.dimension(); ++i) {
            CHECK(A.multiply(one, A.basis_element(i)) == A.basis_element(i));
            CHECK(A.multiply(A.basis_element(i), one) == A.basis_element(i));
        }
        for (int i = 0; i < A.dimension(); ++i)
            for (int j = 0; j < A.dimension(); ++j) {
                const auto& p = A.product(i, j);
                const auto& gi = A.module().gen(i);
                const auto& gj = A.module().gen(j);
                if (gi.weight != gj.weight) CHECK(p.empty());
                for (const auto& [z, c] : p) CHECK(A.degree(z) == A.degree(i) + A.degree(j));
                CHECK(A.rho(A.rho(i)) == i);
            }
        const int nd = static_cast<int>(A.module().bottoms().size());
        for (int b = 0; b < nd; ++b)
            for (int c = 0; c < nd; ++c) {
                const auto p = A.multiply(A.basis_element(A.idempotent(b)), A.basis_element(A.idempotent(c)));
                if (b != c)
                    CHECK(p.empty());
                else
                    CHECK(p == A.basis_element(A.idempotent(b)));
            }
    }
}

TEST_CASE("associativity") {
    auto assoc = [](const ArcAlgebra& A, int i, int j, int k) {
        return A.multiply(A.multiply(A.basis_element(i), A.basis_element(j)), A.basis_element(k)) ==
               A.multiply(A.basis_element(i), A.multiply(A.basis_element(j), A.basis_element(k)));
    };
    for (int n = 0; n <= 2; ++n) {
        const auto& A = arc_algebra(n);
        for (int i = 0; i < A.dimension(); ++i)
            for (int j = 0; j < A.dimension(); ++j)
                for (int k = 0; k < A.dimension(); ++k) CHECK(assoc(A, i, j, k));
    }
    const auto& A = arc_algebra(3);
    std::mt19937 rng(5);
    for (int s = 0; s < 500; ++s) CHECK(assoc(A, rng() % A.dimension(), rng() % A.dimension(), rng() % A.dimension()));
}

TEST_CASE("rho is an automorphism") {
    for (int n = 1; n <= 3; ++n) {
        const auto& A = arc_algebra(n);
        for (int x = 0; x < A.dimension(); ++x)
            for (int y = 0; y < A.dimension(); ++y) {
                GenVector lhs;
                for (auto [z, c] : A.product(x, y)) lhs.push_back({A.rho(z), c});
                GenVector rhs = A.product(A.rho(x), A.rho(y));
                std::sort(lhs.begin(), lhs.end());
                std::sort(rhs.begin(), rhs.end());
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("flat tangles") {
    const auto id = FlatTangle::identity(3);
    CHECK(id.loop_count() == 0);
    CHECK(id.bottom_turnbacks() == 0);
    const auto t = FlatTangle::from_matching(4, 2, {4, 2, 1, 5, 0, 3}, 1);
    CHECK(t.loop_count() == 1);
    CHECK(t.bottom_turnbacks() == 1);
    CHECK(t.contracted().matching() == t.matching());
    const auto s = id.compose(id);
    CHECK(s.matching() == id.matching());
}
