/**
 * @file linalg.hpp
 * @brief Sparse matrices, trigraded cochain complexes, chain maps and homology.
 *
 * Differentials raise the homological degree i. Every basis element carries a
 * quantum degree j and an annular degree k, and differentials preserve both.
 */
#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qakh/coeff.hpp"
#include "qakh/field.hpp"

namespace qakh {

/// Arithmetic policy for LaurentPoly entries (mirrors the RingSpec interface).
struct PolyOps {
    LaurentPoly add(const LaurentPoly& a, const LaurentPoly& b) const { return a + b; }
    LaurentPoly sub(const LaurentPoly& a, const LaurentPoly& b) const { return a - b; }
    LaurentPoly mul(const LaurentPoly& a, const LaurentPoly& b) const { return a * b; }
    LaurentPoly neg(const LaurentPoly& a) const { return -a; }
    bool is_zero(const LaurentPoly& a) const { return a.is_zero(); }
};
inline const PolyOps kPolyOps{};

/// Row-indexed sparse matrix; absent entries are zero, stored entries never are.
template <class T>
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::map<int, T>& row(int r) const { return data_[r]; }

    T get(int r, int c) const {
        auto it = data_[r].find(c);
        return it == data_[r].end() ? T() : it->second;
    }
    template <class Ops>
    void set(int r, int c, const T& v, const Ops& ops) {
        if (ops.is_zero(v))
            data_[r].erase(c);
        else
            data_[r][c] = v;
    }
    template <class Ops>
    void add(int r, int c, const T& v, const Ops& ops) {
        if (ops.is_zero(v)) return;
        auto it = data_[r].find(c);
        if (it == data_[r].end()) {
            data_[r].emplace(c, v);
            return;
        }
        it->second = ops.add(it->second, v);
        if (ops.is_zero(it->second)) data_[r].erase(it);
    }
    size_t nnz() const {
        size_t n = 0;
        for (const auto& r : data_) n += r.size();
        return n;
    }
    bool is_zero() const { return nnz() == 0; }
    bool operator==(const SparseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    template <class Ops>
    SparseMatrix scaled(const T& s, const Ops& ops) const {
        SparseMatrix out(rows_, cols_);
        for (int r = 0; r < rows_; ++r)
            for (const auto& [c, v] : data_[r]) out.set(r, c, ops.mul(s, v), ops);
        return out;
    }

    SparseMatrix transposed() const {
        SparseMatrix out(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (const auto& [c, v] : data_[r]) out.data_[c].emplace(r, v);
        return out;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::map<int, T>> data_;
};

/// A * B.
template <class T, class Ops>
SparseMatrix<T> mat_mul(const SparseMatrix<T>& a, const SparseMatrix<T>& b, const Ops& ops) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: dimension mismatch");
    SparseMatrix<T> out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (const auto& [k, av] : a.row(r))
            for (const auto& [c, bv] : b.row(k)) out.add(r, c, ops.mul(av, bv), ops);
    return out;
}

template <class T, class Ops>
SparseMatrix<T> mat_add(const SparseMatrix<T>& a, const SparseMatrix<T>& b, const Ops& ops) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("mat_add: dimension mismatch");
    SparseMatrix<T> out = a;
    for (int r = 0; r < b.rows(); ++r)
        for (const auto& [c, v] : b.row(r)) out.add(r, c, v, ops);
    return out;
}

template <class T, class Ops>
SparseMatrix<T> identity_matrix(int n, const T& one, const Ops& ops) {
    SparseMatrix<T> m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, one, ops);
    return m;
}

SparseMatrix<Scalar> specialize(const SparseMatrix<LaurentPoly>& m, const RingSpec& r);

/// Basis element of a complex term: gradings plus a human-readable label.
struct BasisLabel {
    int j = 0;
    int k = 0;
    std::string name;
};

/**
 * @brief Cochain complex: term i has a labeled basis, d[i] maps term i to term i+1
 * (rows index the target basis, columns the source).
 */
template <class T>
struct ChainComplexT {
    std::map<int, std::vector<BasisLabel>> terms;
    std::map<int, SparseMatrix<T>> d;

    int dim(int i) const {
        auto it = terms.find(i);
        return it == terms.end() ? 0 : static_cast<int>(it->second.size());
    }
    const std::vector<BasisLabel>& basis(int i) const {
        static const std::vector<BasisLabel> empty;
        auto it = terms.find(i);
        return it == terms.end() ? empty : it->second;
    }
    /// d[i], or a zero matrix of the right shape.
    SparseMatrix<T> diff(int i) const {
        auto it = d.find(i);
        if (it != d.end()) return it->second;
        return SparseMatrix<T>(dim(i + 1), dim(i));
    }
    int min_degree() const { return terms.empty() ? 0 : terms.begin()->first; }
    int max_degree() const { return terms.empty() ? 0 : terms.rbegin()->first; }
    int total_dim() const {
        int n = 0;
        for (const auto& [i, b] : terms) n += static_cast<int>(b.size());
        return n;
    }
};

using GradedChainComplex = ChainComplexT<LaurentPoly>;

/// A complex whose entries already live in a computation ring.
struct SpecializedComplex : ChainComplexT<Scalar> {
    RingSpec ring;
};

SpecializedComplex specialize(const GradedChainComplex& c, const RingSpec& r);

/// Degree-preserving up to (i, j, k) shifts recorded in the map.
template <class T>
struct ChainMapT {
    ChainComplexT<T> source, target;
    std::map<int, SparseMatrix<T>> f;  // f[i]: source^i -> target^(i + ideg)
    int ideg = 0;
    int jdeg = 0;
    int kdeg = 0;

    SparseMatrix<T> component(int i) const {
        auto it = f.find(i);
        if (it != f.end()) return it->second;
        return SparseMatrix<T>(target.dim(i + ideg), source.dim(i));
    }
};

using ChainMap = ChainMapT<LaurentPoly>;

/// Exact check of d*d = 0 and (j, k) preservation.
bool verify_complex(const GradedChainComplex& c, std::string* why = nullptr);
bool verify_complex(const SpecializedComplex& c, std::string* why = nullptr);
/// Exact check of f*d = d*f and grading shifts.
bool verify_chain_map(const ChainMap& m, std::string* why = nullptr);

/// Mapping cone: cone^i = source^(i+1) (j shifted by jdeg) + target^i.
GradedChainComplex cone(const ChainMap& m);
GradedChainComplex direct_sum(const GradedChainComplex& a, const GradedChainComplex& b);
/// Shift homological degree by di and quantum degree by dj.
GradedChainComplex shift(const GradedChainComplex& c, int di, int dj);

/// Ranks and torsion per tridegree. Zero cells are omitted.
struct HomologySummary {
    struct Cell {
        long rank = 0;
        std::vector<BigInt> torsion;
        bool operator==(const Cell& o) const { return rank == o.rank && torsion == o.torsion; }
    };
    std::map<std::array<int, 3>, Cell> cells;  // (i, j, k)
    std::string ring;

    long rank(int i, int j, int k) const;
    long rank_ij(int i, int j) const;  // summed over k
    long total_rank() const;
    bool same_groups(const HomologySummary& o) const { return cells == o.cells; }
    nlohmann::json to_json() const;
    static HomologySummary from_json(const nlohmann::json& j);
};

HomologySummary homology(const SpecializedComplex& c);
HomologySummary homology(const GradedChainComplex& c, const RingSpec& r);

/// Aligned text table ordered by (i, j, k).
std::string poincare_table(const HomologySummary& h);
std::string poincare_csv(const HomologySummary& h);

/// Smith normal form over Z with U*A*V = D checked exactly. Returns the diagonal.
std::vector<BigInt> smith_diagonal(const std::vector<std::vector<BigInt>>& a);

/// Field rank of a scalar matrix (the ring must be a field).
int field_rank(const SparseMatrix<Scalar>& m, const RingSpec& r);

/**
 * @brief Explicit homology basis over a field: representatives of H^i and a
 * coordinate map for cycles. Used for maps induced on homology.
 */
struct HomologyBasis {
    RingSpec ring;
    std::map<int, std::vector<std::vector<Scalar>>> reps;  // i -> representative cycles
    std::map<int, std::vector<std::vector<Scalar>>> coord_rows;  // i -> linear functionals
    int dim(int i) const {
        auto it = reps.find(i);
        return it == reps.end() ? 0 : static_cast<int>(it->second.size());
    }
    std::vector<Scalar> coords(int i, const std::vector<Scalar>& cycle) const;
};

HomologyBasis homology_basis(const SpecializedComplex& c);

/// Matrix of the map induced on H^i by f (f specialized into the basis' ring).
SparseMatrix<Scalar> induced_map(const ChainMap& f, int i, const HomologyBasis& src,
                                 const HomologyBasis& dst);

/// Worker count from QAKH_WORKERS (default 1).
int worker_count();
/// Runs fn(0..n-1) on worker_count() threads.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace qakh
