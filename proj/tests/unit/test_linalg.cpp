/**
 * @file test_linalg.cpp
 * @brief Ranks, Smith normal form, homology of small complexes.
 */
#include <random>

#include "doctest.h"
#include "qakh/linalg.hpp"

using namespace qakh;

namespace {

/// Rank by scanning all square minors (small matrices only).
int minor_rank(const std::vector<std::vector<long>>& a, long p) {
    const int m = a.size(), n = m ? a[0].size() : 0;
    auto det = [&](std::vector<int> rows, std::vector<int> cols) {
        // Gaussian elimination mod p on the minor
        const int k = rows.size();
        std::vector<std::vector<long>> b(k, std::vector<long>(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) b[i][j] = ((a[rows[i]][cols[j]] % p) + p) % p;
        long d = 1;
        for (int c = 0; c < k; ++c) {
            int piv = -1;
            for (int r = c; r < k; ++r)
                if (b[r][c]) { piv = r; break; }
            if (piv < 0) return 0L;
            std::swap(b[piv], b[c]);
            if (piv != c) d = (p - d) % p;
            d = d * b[c][c] % p;
            long inv = 1;
            for (long e = p - 2, base = b[c][c]; e; e >>= 1, base = base * base % p)
                if (e & 1) inv = inv * base % p;
            for (int r = c + 1; r < k; ++r) {
                const long f = b[r][c] * inv % p;
                for (int j = c; j < k; ++j) b[r][j] = ((b[r][j] - f * b[c][j]) % p + p) % p;
            }
        }
        return d;
    };
    for (int k = std::min(m, n); k > 0; --k) {
        std::vector<int> rs(m, 0), cs(n, 0);
        std::fill(rs.begin(), rs.begin() + k, 1);
        do {
            std::fill(cs.begin(), cs.end(), 0);
            std::fill(cs.begin(), cs.begin() + k, 1);
            do {
                std::vector<int> rr, cc;
                for (int i = 0; i < m; ++i)
                    if (rs[i]) rr.push_back(i);
                for (int j = 0; j < n; ++j)
                    if (cs[j]) cc.push_back(j);
                if (det(rr, cc)) return k;
            } while (std::prev_permutation(cs.begin(), cs.end()));
        } while (std::prev_permutation(rs.begin(), rs.end()));
    }
    return 0;
}

GradedChainComplex two_term(const std::vector<std::vector<long>>& d, int j = 0) {
    GradedChainComplex c;
    const int rows = d.size(), cols = d[0].size();
    for (int i = 0; i < cols; ++i) c.terms[0].push_back({j, 0, "a" + std::to_string(i)});
    for (int i = 0; i < rows; ++i) c.terms[1].push_back({j, 0, "b" + std::to_string(i)});
    SparseMatrix<LaurentPoly> m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int s = 0; s < cols; ++s) m.set(r, s, LaurentPoly(d[r][s]), kPolyOps);
    c.d[0] = m;
    return c;
}

}  // namespace

TEST_CASE("field rank agrees with a minor scan") {
    std::mt19937 rng(11);
    const auto r = RingSpec::prime_field(5, 2);
    for (int s = 0; s < 200; ++s) {
        const int m = 1 + rng() % 5, n = 1 + rng() % 5;
        std::vector<std::vector<long>> a(m, std::vector<long>(n));
        SparseMatrix<Scalar> sm(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                a[i][j] = rng() % 3 == 0 ? static_cast<long>(rng() % 5) : 0;
                sm.set(i, j, r.from_int(a[i][j]), r);
            }
        CHECK(field_rank(sm, r) == minor_rank(a, 5));
    }
}

TEST_CASE("smith normal form") {
    const std::vector<std::vector<BigInt>> a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
    const auto d = smith_diagonal(a);
    REQUIRE(d.size() >= 3);
    CHECK(d[0] == 2);
    CHECK(d[1] == 6);
    CHECK(d[2] == 12);
    std::mt19937 rng(3);
    for (int s = 0; s < 50; ++s) {
        const int m = 1 + rng() % 4, n = 1 + rng() % 4;
        std::vector<std::vector<BigInt>> b(m, std::vector<BigInt>(n));
        for (auto& row : b)
            for (auto& x : row) x = static_cast<long>(rng() % 13) - 6;
        const auto e = smith_diagonal(b);  // asserts U A V = D internally
        for (size_t i = 1; i < e.size(); ++i)
            if (e[i] != 0) CHECK(e[i] % e[i - 1] == 0);
    }
}

TEST_CASE("homology over Z sees torsion") {
    const auto c = two_term({{2}});
    const auto h = homology(c, RingSpec::integers());
    CHECK(h.rank(0, 0, 0) == 0);
    CHECK(h.rank(1, 0, 0) == 0);
    REQUIRE(h.cells.count({1, 0, 0}));
    CHECK(h.cells.at({1, 0, 0}).torsion == std::vector<BigInt>{2});
    CHECK(homology(c, RingSpec::prime_field(2, 1)).rank(1, 0, 0) == 1);
    CHECK(homology(c, RingSpec::rationals(1)).total_rank() == 0);
}

TEST_CASE("homology of a direct sum is the sum") {
    const auto a = two_term({{1, 1}, {1, 1}}, 0);
    const auto b = two_term({{0, 3}}, 2);
    for (const auto& r : {RingSpec::rationals(1), RingSpec::prime_field(3, 1), RingSpec::integers()}) {
        const auto ha = homology(a, r), hb = homology(b, r), hs = homology(direct_sum(a, b), r);
        HomologySummary want = ha;
        for (const auto& [k, c] : hb.cells) {
            want.cells[k].rank += c.rank;
            auto& t = want.cells[k].torsion;
            t.insert(t.end(), c.torsion.begin(), c.torsion.end());
        }
        CHECK(hs.cells == want.cells);
    }
}

TEST_CASE("summary json round trip and table") {
    const auto h = homology(two_term({{2, 0}}), RingSpec::integers());
    CHECK(HomologySummary::from_json(h.to_json()).cells == h.cells);
    CHECK(poincare_csv(h).rfind("i,j,k,rank,torsion\n", 0) == 0);
}

TEST_CASE("cone and shift") {
    const auto c = two_term({{1}});
    CHECK(verify_complex(c));
    const auto s = shift(c, 2, 3);
    CHECK(s.min_degree() == 2);
    CHECK(s.basis(2)[0].j == 3);
}

TEST_CASE("homology basis coordinates") {
    const auto c = specialize(two_term({{1, 1, 0}}), RingSpec::prime_field(7, 1));
    const auto hb = homology_basis(c);
    CHECK(hb.dim(0) == 2);
    CHECK(hb.dim(1) == 0);
    for (const auto& rep : hb.reps.at(0)) CHECK(hb.coords(0, rep).size() == 2);
}
