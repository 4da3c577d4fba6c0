/**
 * @file tqft.hpp
 * @brief Quantum annular TQFT: state spaces, surgery maps, bracket complexes,
 * the U_q(sl2) action and the Mobius variant.
 *
 * Every cube vertex is an open flat (n,n)-tangle D. It is cut at its boundary
 * as D = C_top o C_bot, where C_top holds the through strands and the top cups
 * and C_bot the bottom caps. When C_bot o C_top is the identity on the through
 * strands plus loops (always true for n <= 3), the trace of D is identified
 * with t essential circles plus the trivial circles of D and those loops. Edge
 * maps are computed by sliding the saddle across that identification, so the
 * seam q-powers come out of the trace rather than from ad hoc rules.
 */
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qakh/linalg.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

enum class CircleLabel { WPlus, WMinus, VPlus, VMinus };

struct TqftGenerator {
    std::vector<CircleLabel> labels;  // essential circles first, then trivial ones
    int j = 0;
    int k = 0;
    std::string name() const;
};

/// 2^(circles) generators of a canonical configuration, unshifted.
std::vector<TqftGenerator> state_space(const AnnularCurveConfig& cfg);

/**
 * Core surgeries on canonical configurations. Basis orders: W = (w+, w-),
 * V = (v+, v-), tensor products lexicographic, the empty object has rank 1.
 */
enum class CoreSurgery { MergeWW, SplitWW, MergeVW, SplitVW, MergeVV, SplitVV, Cup, Cap };
SparseMatrix<LaurentPoly> core_surgery(CoreSurgery s);

SparseMatrix<LaurentPoly> ev_matrix();    // V (x) V -> 1
SparseMatrix<LaurentPoly> coev_matrix();  // 1 -> V (x) V
/// (ev (x) 1)(1 (x) coev) and (1 (x) ev)(coev (x) 1) on V.
std::pair<SparseMatrix<LaurentPoly>, SparseMatrix<LaurentPoly>> zigzags();
/// Split a trivial circle into two essential ones and merge them back: w+ -> (q + q^-1) w-.
LaurentPoly torus_eval_check();

enum class Geometry { Annulus, Mobius };

/// One cube vertex, cut into C_top / C_bot plus own loops.
struct FlatVertex {
    int n = 0;
    int t = 0;  // through strands
    std::vector<std::pair<int, int>> bot_pairs, top_pairs;  // boundary positions joined by arcs of D
    std::vector<int> bot_through, top_through;
    std::vector<std::vector<int>> object_loops;  // loops of C_bot o C_top, as interface position sets
    std::vector<int> own_loops;                  // smallest node id of every closed component of D
    ResolutionGraph rg;
    int essential = 0;  // V factors: t (annulus) or t/2 (Mobius)

    int factors() const { return essential + static_cast<int>(object_loops.size() + own_loops.size()); }
    int dim() const { return 1 << factors(); }
    /// Labels of basis element idx (factor 0 is the most significant bit).
    std::vector<CircleLabel> labels(int idx) const;
    int quantum_degree(int idx) const;
    int annular_degree(int idx) const;
};

FlatVertex analyze_vertex(const TangleWord& w, const std::vector<int>& xi, Geometry g);

/// Unsigned map between vertices differing at crossing `site` (bit 0 -> 1).
SparseMatrix<LaurentPoly> vertex_edge_map(const FlatVertex& from, const FlatVertex& to, const TangleWord& w,
                                          int site, Geometry g);

struct BracketData {
    GradedChainComplex complex;  // unshifted: degree |xi|, quantum shift |xi|
    std::vector<FlatVertex> vertices;  // by mask
    std::vector<int> offset;           // position of each vertex block inside its term
};

BracketData build_bracket(const TangleWord& w, Geometry g = Geometry::Annulus);
/// Bracket with the global shifts [-n_-]{n_+ - 2 n_-}.
GradedChainComplex build_complex(const TangleWord& w);
/// Mobius closure (top p glued to bottom n-1-p); n must be 2.
GradedChainComplex mobius_build_complex(const TangleWord& w);
/// n_+ and n_- of the closure in the given geometry.
std::pair<int, int> crossing_counts(const TangleWord& w, Geometry g);

/// E, F, K ('K') or K^-1 ('k') on V^(x)n; factor 0 (next to the seam) is V1*.
SparseMatrix<LaurentPoly> uqsl2_operator(char g, int n);
/// The operator acting degreewise on build_complex(w).
std::map<int, SparseMatrix<LaurentPoly>> complex_uq_action(const TangleWord& w, char g);

/// Resolving crossing c of w to its 0 / 1 smoothings and the saddle between their brackets.
struct ViroData {
    TangleWord d0, d1;
    ChainMap saddle;  // unshifted bracket(d0) -> bracket(d1), quantum degree -1
};
ViroData viro_saddle(const TangleWord& w, int c);
/**
 * Checks that bracket(w) equals cone(saddle) shifted by [1]{1} after matching
 * basis labels and a diagonal change of signs.
 */
bool viro_check(const TangleWord& w, int c, std::string* why = nullptr);

}  // namespace qakh
