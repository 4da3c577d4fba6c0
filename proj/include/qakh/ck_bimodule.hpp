/**
 * @file ck_bimodule.hpp
 * @brief The (H^n, H^m) bimodules F(T) of flat tangles, their tensor products,
 * saddle maps, and the cube complex of a tangle word built from them.
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qakh/arc_algebra.hpp"
#include "qakh/linalg.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

/// Shared, lazily built H^n (thread safe).
const ArcAlgebra& arc_algebra(int n);

/**
 * F(T) for a flat (m, n) tangle with its left H^n and right H^m actions.
 * The module lives on the contracted tangle, loops included as free components.
 */
class CKBimodule {
public:
    explicit CKBimodule(const FlatTangle& t);

    const DiagramModule& module() const { return mod_; }
    const FlatTangle& tangle() const { return mod_.tangle(); }
    int size() const { return mod_.size(); }
    int m() const { return tangle().m; }
    int n() const { return tangle().n; }
    const ArcAlgebra& top_algebra() const { return arc_algebra(n()); }
    const ArcAlgebra& bottom_algebra() const { return arc_algebra(m()); }

    /// x . g for a basis element x of H^n.
    const GenVector& left(int x, int g) const { return left_[x][g]; }
    /// g . y for a basis element y of H^m.
    const GenVector& right(int g, int y) const { return right_[g][y]; }

    /// Exact checks: associativity of both actions, units, and (x g) y = x (g y).
    bool verify_bimodule(std::string* why = nullptr) const;

private:
    DiagramModule mod_;
    std::vector<std::vector<GenVector>> left_, right_;
};

/// Module map between diagram modules, column g = image of generator g.
struct BimoduleMap {
    int rows = 0;
    std::vector<GenVector> cols;
    SparseMatrix<LaurentPoly> matrix() const;
};

/**
 * Saddle at crossing c of w between the resolutions at xi (bit c = 0) and
 * xi with bit c set. Both bimodules must be built from those resolutions.
 */
BimoduleMap saddle_map(const TangleWord& w, const std::vector<int>& xi, int c, const CKBimodule& from,
                       const CKBimodule& to);

/// True if the map commutes with both actions.
bool is_bimodule_map(const BimoduleMap& f, const CKBimodule& from, const CKBimodule& to, std::string* why = nullptr);

/**
 * M (x)_{H^j} N for M = F(upper), N = F(lower), compared with F(upper o lower)
 * through the gluing map mu. Over a field.
 */
struct TensorCheck {
    int ambient = 0;          // |M| * |N|
    int tensor_dim = 0;       // dimension of the balanced tensor product
    int composite_dim = 0;    // dimension of F(upper o lower)
    int mu_rank = 0;
    bool mu_balanced = false; // mu kills every balancing relation
    bool isomorphism() const { return mu_balanced && mu_rank == tensor_dim && tensor_dim == composite_dim; }
};
TensorCheck tensor_check(const CKBimodule& upper, const CKBimodule& lower, const RingSpec& r);

/// Cube of resolutions of a word with bimodules at the vertices.
struct CKComplex {
    TangleWord word;
    int crossings = 0, n_plus = 0, n_minus = 0;
    std::vector<FlatTangle> resolutions;  // by mask, uncontracted
    std::vector<std::shared_ptr<const CKBimodule>> vertices;
    struct Edge {
        unsigned from = 0;
        int bit = 0;
        int sign = 1;
        BimoduleMap map;
    };
    std::vector<Edge> edges;
    /// Homological degree |xi| - n_minus; the map d raises it by one.
    std::vector<int> offset;  // first index of each vertex in its term
    int homological(unsigned mask) const;
    int quantum(unsigned mask, int g) const;
    int weight(unsigned mask, int g) const;
    /// Flattened complex with trigrading (i, j, k) = (|xi| - n_-, deg + |xi| + n_+ - 2 n_-, weight).
    GradedChainComplex complex() const;
};

/// `signs` selects the closure used to orient crossings.
CKComplex ck_complex(const TangleWord& w, Closure signs = Closure::Annular);

}  // namespace qakh
