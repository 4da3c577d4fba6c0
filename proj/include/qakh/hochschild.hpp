/**
 * @file hochschild.hpp
 * @brief Quantum (and reflection-twisted) coinvariants of CK bimodules, the
 * coinvariant pipeline for annular and Mobius homology, truncated bar complexes
 * for higher quantum Hochschild homology, and the canonical basis map to V^(x)n.
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "qakh/ck_bimodule.hpp"
#include "qakh/linalg.hpp"

namespace qakh {

/**
 * M / [M, A]_{phi,q} over a field, [M, A] spanned by q^{-deg a} phi(a) m - m a.
 * The quotient basis consists of classes of generators of M.
 */
struct CoinvariantPresentation {
    RingSpec ring;
    int ambient = 0;
    int relation_count = 0;  // spanning relations generated
    int relation_rank = 0;
    std::vector<int> basis;                 // generator indices
    std::vector<std::vector<std::pair<int, Scalar>>> rref;  // reduced relations, one per pivot
    std::vector<int> pivots;

    int dim() const { return static_cast<int>(basis.size()); }
    /// Quotient coordinates of an ambient vector.
    std::vector<Scalar> project(std::vector<Scalar> v) const;
};

/// phi = identity, or the reflection rho when `twisted`. Integers are rejected.
CoinvariantPresentation coinv_q(const CKBimodule& m, bool twisted, const RingSpec& r);
/// Relation vectors of the presentation above (for checking that project kills them).
std::vector<std::vector<Scalar>> coinvariant_relations(const CKBimodule& m, bool twisted, const RingSpec& r);

/// Termwise coinvariants of the CK complex with the induced differential.
SpecializedComplex qhh_complex(const CKComplex& c, bool twisted, const RingSpec& r);

/// The same together with the per-vertex presentations (basis names are "mask:generator").
struct CoinvariantComplex {
    SpecializedComplex complex;
    std::vector<CoinvariantPresentation> pres;  // by mask
    std::vector<int> offset;                    // first index of each vertex block in its term
};
CoinvariantComplex coinvariant_complex(const CKComplex& c, bool twisted, const RingSpec& r);
/// Quantum annular homology of the closure of w through coinvariants.
HomologySummary qhh_annular(const TangleWord& w, const RingSpec& r);
/// Mobius homology through rho-twisted coinvariants (2-strand words).
HomologySummary qhh_mobius(const TangleWord& w, const RingSpec& r);

/// Homology of the bar complex M (x) A^(x)k, k <= N, with M = A = H^n.
struct TruncatedHH {
    int n = 0, N = 0;
    std::map<int, long> chain_dims;  // k -> dim C_k
    std::map<int, long> homology;    // k -> dim qHH_k, for k < N
};
TruncatedHH qhh_truncated(int n, bool twisted, const RingSpec& r, int N, long max_basis = 200000);

/// Spot-checks d_i d_j = d_{j-1} d_i (i < j) on random basis tensors of degree k.
bool face_identities(int n, bool twisted, const RingSpec& r, int k, int samples, std::uint64_t seed,
                     std::string* why = nullptr);

/**
 * Images of the idempotent classes [e_a] in V^(x)n: each cup becomes
 * v+ (x) v- + q^-1 v- (x) v+ on its endpoints, L becomes v-, R becomes v+.
 * Columns follow enumerate_cup_diagrams(n); rows index V^(x)n with factor 0
 * as the most significant bit and bit 1 = v-.
 */
SparseMatrix<LaurentPoly> canonical_basis_map(int n);
/// Determinant over Z[q, q^-1] (small square matrices only).
LaurentPoly determinant(const SparseMatrix<LaurentPoly>& m);
/// True if the classes of the idempotents (of symmetric diagrams when twisted) form a basis of the coinvariants of H^n.
bool idempotents_span_coinvariants(int n, bool twisted, const RingSpec& r);

}  // namespace qakh
