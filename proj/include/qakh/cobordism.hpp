/**
 * @file cobordism.hpp
 * @brief Chain maps of movie clips, Gaussian elimination, cabling, and the
 * action of braid-like tangles on homology of cables (characteristic 2).
 *
 * Two families of maps live here. clip_map works on the TQFT complexes of
 * tqft.hpp. The tangle action is evaluated on termwise coinvariants of CK
 * complexes, where sliding a slice through the seam is the cyclic isomorphism
 * [x (x) y] -> q^-|y| [y (x) x] of coinvariants of a tensor product.
 */
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qakh/hochschild.hpp"
#include "qakh/linalg.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

// ---------------------------------------------------------------- elimination

/**
 * Result of cancelling invertible entries d(a, b) between generators that are
 * not kept. iota: reduced -> original and pi: original -> reduced are mutually
 * inverse homotopy equivalences; pi * iota = 1.
 */
template <class T>
struct Reduction {
    ChainComplexT<T> complex;                // basis = surviving original generators
    std::map<int, std::vector<int>> kept;    // degree -> original indices, increasing
    std::map<int, SparseMatrix<T>> iota;     // iota[i]: reduced^i -> original^i
    std::map<int, SparseMatrix<T>> pi;       // pi[i]: original^i -> reduced^i
    int leftover = 0;                        // non-kept generators that could not be cancelled
};

using KeepFn = std::function<bool(int degree, int index)>;
/// Whether d(a, b) with b in degree i may serve as a pivot.
using PivotFn = std::function<bool(int degree, int b, int a)>;

/// Pivots must be +-q^k.
Reduction<LaurentPoly> gaussian_eliminate(const GradedChainComplex& c, const KeepFn& keep);
Reduction<LaurentPoly> gaussian_eliminate(const GradedChainComplex& c, const KeepFn& keep, const PivotFn& allowed);
/// Any nonzero pivot (c.ring must be a field).
Reduction<Scalar> gaussian_eliminate(const SpecializedComplex& c, const KeepFn& keep);
/// Only pivots accepted by `allowed`; with a suitable pivot set the maps respect extra structure.
Reduction<Scalar> gaussian_eliminate(const SpecializedComplex& c, const KeepFn& keep, const PivotFn& allowed);

// ---------------------------------------------------------------- clips

enum class ClipKind { Saddle, Cup, Cap, R1, R2, R3 };

/**
 * One elementary piece of a movie, acting at slice index `slice` (0-based) of
 * the source word.
 * Saddle: the slice is a frozen smoothing v<pos> / h<pos>, swapped for the other.
 * Cup / Cap: birth / death of a small circle, the slices u<pos> a<pos>.
 * R1: a kink u<pos+1> x<pos> a<pos+1> on strand pos, x = p (sign > 0) or n.
 * R2: the pair p<pos> n<pos> (sign > 0) or n<pos> p<pos>.
 * With `inverse` the R-moves remove the slices starting at `slice` instead.
 */
struct MovieClip {
    ClipKind kind = ClipKind::Saddle;
    int slice = 0;
    int pos = 1;
    int sign = 1;
    bool inverse = false;
    std::string describe() const;
};

/// deg = chi - #B/4 - 2 d.
struct CobordismDegree {
    int euler = 0;
    int corners = 0;
    int dots = 0;
    int value() const;
};
CobordismDegree clip_degree(const MovieClip& c);

/// Target word of a clip; throws std::invalid_argument when the clip does not apply.
TangleWord apply_clip(const TangleWord& w, const MovieClip& c);

/**
 * Chain map between build_complex(source) and build_complex(target). Saddles
 * and cups / caps are TQFT surgeries; R1 / R2 come from Gaussian elimination of
 * the larger complex onto the vertices isotopic to the smaller word, with a
 * diagonal unit rescaling that matches the reduced differential to the smaller
 * complex. R3 is refused.
 */
ChainMap clip_map(const TangleWord& w, const MovieClip& c);

/// Composite of clip maps along a movie (sources and targets chain).
ChainMap compose(const ChainMap& second, const ChainMap& first);

/// Matrix of the map induced on H^i over r.
SparseMatrix<Scalar> homology_map(const ChainMap& f, int i, const RingSpec& r);

// ---------------------------------------------------------------- cabling

struct Cable {
    TangleWord word;
    int k = 1;
    std::vector<int> eps;
    int writhe = 0;   // writhe of the (1,1) tangle
    int flips = 0;    // entries of eps equal to -1
    /// [2(k-1)w]{6(k-1)w} per orientation flip.
    int hshift() const { return 2 * (k - 1) * writhe * flips; }
    int qshift() const { return 6 * (k - 1) * writhe * flips; }
};

/**
 * k-cable of a (1,1) word: crossings become k x k blocks with the same crossing
 * type, cups and caps become k nested ones. eps orients the parallel copies
 * (eps[a] flips copy a against the original strand).
 */
Cable cable(const TangleWord& w, int k, const std::vector<int>& eps);

// ---------------------------------------------------------------- tangle action

/// One step of an action movie on words.
struct ActionStep {
    enum Kind { R2Insert, R2Remove, Rotate } kind = Rotate;
    int slice = 0;  // R2: first slice of the pair
    int pos = 1;
    bool positive_first = true;
    std::string describe() const;
};

struct TangleAction {
    TangleWord cable;                           // word whose closure carries the action
    std::vector<ActionStep> movie;
    RingSpec ring;
    SpecializedComplex complex;                 // coinvariant complex of the cable
    HomologyBasis basis;
    std::map<int, SparseMatrix<Scalar>> matrix;  // i -> action on H^i in basis coordinates
    int dim() const;
};

/**
 * Action of the braid-like (k, k) word tp on homology of the closure of the
 * k-cable of t, obtained by inserting tp tp^-1 by R2 moves, sliding tp^-1
 * through the cable, moving tp through the seam and cancelling. Requires
 * characteristic 2. The cable must be the identity, or a 2-strand braid
 * word (crossing moves then reduce to R2 moves); `full_twists` replaces the
 * cable of t by that power of the 2-strand full twist, the braid form of a
 * framed (1,1) strand.
 */
TangleAction tangle_action(const TangleWord& t, const TangleWord& tp, const RingSpec& r);
TangleAction braid_action(const TangleWord& base, const TangleWord& tp, const RingSpec& r);
TangleAction full_twist_action(int full_twists, const TangleWord& tp, const RingSpec& r);

/// Action on coinv(H^k) for the trivial tangle, rewritten in the V^(x)k basis (bit 1 = v-).
SparseMatrix<Scalar> action_in_tensor_basis(const TangleAction& a);
/// [X, S] = 0 for X in {E, F, K} on V^(x)k (trivial tangle only).
bool commutes_with_uq(const TangleAction& a, std::string* why = nullptr);

struct SkeinReport {
    bool holds = false;
    bool guard = false;  // all three maps zero
    TangleAction pos, neg;
    SparseMatrix<Scalar> id;
    /// Exponent e with q^2 S(neg) + q^-2 S(pos) = q^e (q + q^-1) S(id), if the
    /// literal relation fails by a uniform power; INT_MIN otherwise.
    int discrepancy = 0;
    std::string note;
};

/// The char-2 form q^2 S(neg) + q^-2 S(pos) = (q + q^-1) S(id) on the 2-cable.
SkeinReport skein_check(const TangleWord& t, const RingSpec& r);
/// The same with the cable replaced by a power of the full twist.
SkeinReport skein_check_twisted(int full_twists, const RingSpec& r);
/// Relation evaluated on given matrices.
bool skein_relation(const SparseMatrix<Scalar>& s_pos, const SparseMatrix<Scalar>& s_neg,
                    const SparseMatrix<Scalar>& s_id, const RingSpec& r);

}  // namespace qakh
