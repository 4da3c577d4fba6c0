/**
 * @file linalg.cpp
 * @brief Complex verification, cones, block-wise homology, Smith normal form.
 */
#include "qakh/linalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace qakh {

SparseMatrix<Scalar> specialize(const SparseMatrix<LaurentPoly>& m, const RingSpec& r) {
    SparseMatrix<Scalar> out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (const auto& [c, v] : m.row(i)) out.set(i, c, specialize(v, r), r);
    return out;
}

SpecializedComplex specialize(const GradedChainComplex& c, const RingSpec& r) {
    SpecializedComplex s;
    s.ring = r;
    s.terms = c.terms;
    for (const auto& [i, m] : c.d) s.d[i] = specialize(m, r);
    return s;
}

namespace {

template <class T, class Ops>
bool verify_impl(const ChainComplexT<T>& c, const Ops& ops, std::string* why) {
    for (const auto& [i, m] : c.d) {
        if (m.rows() != c.dim(i + 1) || m.cols() != c.dim(i)) {
            if (why) *why = "d^" + std::to_string(i) + " has wrong shape";
            return false;
        }
        const auto& src = c.basis(i);
        const auto& dst = c.basis(i + 1);
        for (int r = 0; r < m.rows(); ++r)
            for (const auto& [col, v] : m.row(r)) {
                (void)v;
                if (src[col].j != dst[r].j || src[col].k != dst[r].k) {
                    if (why)
                        *why = "d^" + std::to_string(i) + " entry (" + std::to_string(r) + "," +
                               std::to_string(col) + ") breaks the (j,k) grading: " + src[col].name +
                               " -> " + dst[r].name;
                    return false;
                }
            }
        auto next = c.d.find(i + 1);
        if (next != c.d.end() && !mat_mul(next->second, m, ops).is_zero()) {
            if (why) *why = "d^" + std::to_string(i + 1) + " d^" + std::to_string(i) + " != 0";
            return false;
        }
    }
    return true;
}

}  // namespace

bool verify_complex(const GradedChainComplex& c, std::string* why) { return verify_impl(c, kPolyOps, why); }
bool verify_complex(const SpecializedComplex& c, std::string* why) { return verify_impl(c, c.ring, why); }

bool verify_chain_map(const ChainMap& m, std::string* why) {
    std::set<int> degs;
    for (const auto& [i, b] : m.source.terms) degs.insert(i);
    for (int i : degs) {
        // f^{i+1} d_S^i == d_T^{i+ideg} f^i
        auto lhs = mat_mul(m.component(i + 1), m.source.diff(i), kPolyOps);
        auto rhs = mat_mul(m.target.diff(i + m.ideg), m.component(i), kPolyOps);
        if (!(lhs == rhs)) {
            if (why) *why = "chain map fails to commute at degree " + std::to_string(i);
            return false;
        }
        auto f = m.component(i);
        const auto& src = m.source.basis(i);
        const auto& dst = m.target.basis(i + m.ideg);
        for (int r = 0; r < f.rows(); ++r)
            for (const auto& [c, v] : f.row(r)) {
                (void)v;
                if (src[c].j + m.jdeg != dst[r].j || src[c].k + m.kdeg != dst[r].k) {
                    if (why) *why = "chain map breaks the grading at degree " + std::to_string(i);
                    return false;
                }
            }
    }
    return true;
}

GradedChainComplex cone(const ChainMap& m) {
    if (m.ideg != 0) throw std::invalid_argument("cone: map must preserve homological degree");
    GradedChainComplex out;
    std::set<int> degs;
    for (const auto& [i, b] : m.source.terms) degs.insert(i - 1);
    for (const auto& [i, b] : m.target.terms) degs.insert(i);
    for (int i : degs) {
        auto& basis = out.terms[i];
        for (auto b : m.source.basis(i + 1)) {
            b.j += m.jdeg;
            b.k += m.kdeg;
            b.name = "s:" + b.name;
            basis.push_back(b);
        }
        for (auto b : m.target.basis(i)) {
            b.name = "t:" + b.name;
            basis.push_back(b);
        }
        if (basis.empty()) out.terms.erase(i);
    }
    for (int i : degs) {
        if (out.dim(i) == 0 || out.dim(i + 1) == 0) continue;
        int s0 = m.source.dim(i + 1), s1 = m.source.dim(i + 2);
        SparseMatrix<LaurentPoly> d(out.dim(i + 1), out.dim(i));
        auto ds = m.source.diff(i + 1);
        for (int r = 0; r < ds.rows(); ++r)
            for (const auto& [c, v] : ds.row(r)) d.set(r, c, -v, kPolyOps);
        auto f = m.component(i + 1);
        for (int r = 0; r < f.rows(); ++r)
            for (const auto& [c, v] : f.row(r)) d.set(s1 + r, c, v, kPolyOps);
        auto dt = m.target.diff(i);
        for (int r = 0; r < dt.rows(); ++r)
            for (const auto& [c, v] : dt.row(r)) d.set(s1 + r, s0 + c, v, kPolyOps);
        if (!d.is_zero()) out.d[i] = d;
    }
    return out;
}

GradedChainComplex direct_sum(const GradedChainComplex& a, const GradedChainComplex& b) {
    GradedChainComplex out;
    std::set<int> degs;
    for (const auto& [i, x] : a.terms) degs.insert(i);
    for (const auto& [i, x] : b.terms) degs.insert(i);
    for (int i : degs) {
        auto& basis = out.terms[i];
        basis = a.basis(i);
        basis.insert(basis.end(), b.basis(i).begin(), b.basis(i).end());
    }
    for (int i : degs) {
        if (out.dim(i + 1) == 0) continue;
        SparseMatrix<LaurentPoly> d(out.dim(i + 1), out.dim(i));
        auto da = a.diff(i), db = b.diff(i);
        for (int r = 0; r < da.rows(); ++r)
            for (const auto& [c, v] : da.row(r)) d.set(r, c, v, kPolyOps);
        for (int r = 0; r < db.rows(); ++r)
            for (const auto& [c, v] : db.row(r)) d.set(a.dim(i + 1) + r, a.dim(i) + c, v, kPolyOps);
        if (!d.is_zero()) out.d[i] = d;
    }
    return out;
}

GradedChainComplex shift(const GradedChainComplex& c, int di, int dj) {
    GradedChainComplex out;
    for (const auto& [i, b] : c.terms) {
        auto nb = b;
        for (auto& x : nb) x.j += dj;
        out.terms[i + di] = nb;
    }
    for (const auto& [i, m] : c.d) out.d[i + di] = m;
    return out;
}

// ---------------------------------------------------------------- SNF

std::vector<BigInt> smith_diagonal(const std::vector<std::vector<BigInt>>& a) {
    const int m = static_cast<int>(a.size());
    const int n = m == 0 ? 0 : static_cast<int>(a[0].size());
    auto D = a;
    std::vector<std::vector<BigInt>> U(m, std::vector<BigInt>(m, 0)), V(n, std::vector<BigInt>(n, 0));
    for (int i = 0; i < m; ++i) U[i][i] = 1;
    for (int i = 0; i < n; ++i) V[i][i] = 1;

    auto row_axpy = [&](int dst, int src, const BigInt& f) {  // row dst -= f * row src
        for (int c = 0; c < n; ++c)
            if (sgn(D[src][c]) != 0) D[dst][c] -= f * D[src][c];
        for (int c = 0; c < m; ++c)
            if (sgn(U[src][c]) != 0) U[dst][c] -= f * U[src][c];
    };
    auto col_axpy = [&](int dst, int src, const BigInt& f) {  // col dst -= f * col src
        for (int r = 0; r < m; ++r)
            if (sgn(D[r][src]) != 0) D[r][dst] -= f * D[r][src];
        for (int r = 0; r < n; ++r)
            if (sgn(V[r][src]) != 0) V[r][dst] -= f * V[r][src];
    };
    auto swap_rows = [&](int x, int y) {
        std::swap(D[x], D[y]);
        std::swap(U[x], U[y]);
    };
    auto swap_cols = [&](int x, int y) {
        for (auto& row : D) std::swap(row[x], row[y]);
        for (auto& row : V) std::swap(row[x], row[y]);
    };

    for (int t = 0; t < std::min(m, n); ++t) {
        // Minimal absolute value pivot in the trailing block.
        int pr = -1, pc = -1;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (sgn(D[i][j]) != 0 && (pr < 0 || abs(D[i][j]) < abs(D[pr][pc]))) pr = i, pc = j;
        if (pr < 0) break;
        swap_rows(t, pr);
        swap_cols(t, pc);
        while (true) {
            bool clean = true;
            for (int i = t + 1; i < m; ++i) {
                if (sgn(D[i][t]) == 0) continue;
                BigInt qd;
                mpz_tdiv_q(qd.get_mpz_t(), D[i][t].get_mpz_t(), D[t][t].get_mpz_t());
                row_axpy(i, t, qd);
                if (sgn(D[i][t]) != 0) clean = false;
            }
            for (int j = t + 1; j < n; ++j) {
                if (sgn(D[t][j]) == 0) continue;
                BigInt qd;
                mpz_tdiv_q(qd.get_mpz_t(), D[t][j].get_mpz_t(), D[t][t].get_mpz_t());
                col_axpy(j, t, qd);
                if (sgn(D[t][j]) != 0) clean = false;
            }
            if (!clean) {
                // A remainder is smaller than the pivot: move it in and repeat.
                int br = t, bc = t;
                for (int i = t + 1; i < m; ++i)
                    if (sgn(D[i][t]) != 0 && abs(D[i][t]) < abs(D[br][bc])) br = i, bc = t;
                for (int j = t + 1; j < n; ++j)
                    if (sgn(D[t][j]) != 0 && abs(D[t][j]) < abs(D[br][bc])) br = t, bc = j;
                if (br != t) swap_rows(t, br);
                if (bc != t) swap_cols(t, bc);
                continue;
            }
            int bad = -1;
            for (int i = t + 1; i < m && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (sgn(D[i][j]) != 0 && !mpz_divisible_p(D[i][j].get_mpz_t(), D[t][t].get_mpz_t())) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            row_axpy(t, bad, BigInt(-1));  // row t += row bad
        }
    }

    // U * A * V must equal D exactly.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            BigInt acc = 0;
            for (int k = 0; k < m; ++k) {
                if (sgn(U[i][k]) == 0) continue;
                BigInt inner = 0;
                for (int l = 0; l < n; ++l)
                    if (sgn(a[k][l]) != 0 && sgn(V[l][j]) != 0) inner += a[k][l] * V[l][j];
                acc += U[i][k] * inner;
            }
            if (acc != D[i][j]) throw std::logic_error("smith_diagonal: U*A*V != D");
            if (i != j && sgn(D[i][j]) != 0) throw std::logic_error("smith_diagonal: result not diagonal");
        }
    std::vector<BigInt> diag;
    for (int t = 0; t < std::min(m, n); ++t)
        if (sgn(D[t][t]) != 0) diag.push_back(abs(D[t][t]));
    for (size_t t = 1; t < diag.size(); ++t)
        if (!mpz_divisible_p(diag[t].get_mpz_t(), diag[t - 1].get_mpz_t()))
            throw std::logic_error("smith_diagonal: divisibility chain broken");
    return diag;
}

// ---------------------------------------------------------------- homology

namespace {

template <class F>
Dense<F> to_dense(const F& f, const SparseMatrix<Scalar>& m, const std::vector<int>& rows,
                  const std::vector<int>& cols) {
    Dense<F> d(static_cast<int>(rows.size()), static_cast<int>(cols.size()), f);
    std::vector<int> col_pos(m.cols(), -1);
    for (size_t c = 0; c < cols.size(); ++c) col_pos[cols[c]] = static_cast<int>(c);
    for (size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : m.row(rows[r]))
            if (col_pos[c] >= 0) d.at(static_cast<int>(r), col_pos[c]) = f.from(v);
    return d;
}

struct BlockRanks {
    long rank = 0;
    std::vector<BigInt> torsion;  // invariant factors > 1
};

BlockRanks block_rank(const SpecializedComplex& c, int i, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    BlockRanks out;
    if (rows.empty() || cols.empty()) return out;
    auto it = c.d.find(i);
    if (it == c.d.end()) return out;
    const auto& m = it->second;
    if (c.ring.kind() == RingKind::Integers) {
        std::vector<std::vector<BigInt>> a(rows.size(), std::vector<BigInt>(cols.size(), 0));
        std::vector<int> col_pos(m.cols(), -1);
        for (size_t k = 0; k < cols.size(); ++k) col_pos[cols[k]] = static_cast<int>(k);
        bool any = false;
        for (size_t r = 0; r < rows.size(); ++r)
            for (const auto& [col, v] : m.row(rows[r]))
                if (col_pos[col] >= 0) {
                    a[r][col_pos[col]] = v.get_num();
                    any = true;
                }
        if (!any) return out;
        for (const auto& dv : smith_diagonal(a)) {
            ++out.rank;
            if (dv > 1) out.torsion.push_back(dv);
        }
        return out;
    }
    out.rank = with_field(c.ring, [&](const auto& f) { return static_cast<long>(dense_rank(f, to_dense(f, m, rows, cols))); });
    return out;
}

}  // namespace

HomologySummary homology(const SpecializedComplex& c) {
    HomologySummary h;
    h.ring = c.ring.name();
    // Index basis elements by (j, k) block.
    std::map<std::pair<int, int>, std::map<int, std::vector<int>>> blocks;
    for (const auto& [i, basis] : c.terms)
        for (int idx = 0; idx < static_cast<int>(basis.size()); ++idx)
            blocks[{basis[idx].j, basis[idx].k}][i].push_back(idx);
    std::vector<std::pair<std::pair<int, int>, std::map<int, std::vector<int>>>> work(blocks.begin(), blocks.end());
    std::vector<std::map<std::array<int, 3>, HomologySummary::Cell>> results(work.size());
    parallel_for(static_cast<int>(work.size()), [&](int w) {
        const auto& [jk, per_i] = work[w];
        std::map<int, BlockRanks> ranks;  // rank of d^i restricted to this block
        static const std::vector<int> none;
        auto idx = [&](int i) -> const std::vector<int>& {
            auto it = per_i.find(i);
            return it == per_i.end() ? none : it->second;
        };
        for (const auto& [i, cols] : per_i) {
            ranks[i] = block_rank(c, i, idx(i + 1), cols);
            if (!per_i.count(i - 1)) ranks[i - 1] = BlockRanks{};
        }
        for (const auto& [i, cols] : per_i) {
            HomologySummary::Cell cell;
            cell.rank = static_cast<long>(cols.size()) - ranks[i].rank - ranks[i - 1].rank;
            cell.torsion = ranks[i - 1].torsion;
            if (cell.rank != 0 || !cell.torsion.empty()) results[w][{i, jk.first, jk.second}] = cell;
        }
    });
    for (auto& r : results)
        for (auto& [key, cell] : r) h.cells[key] = cell;
    return h;
}

HomologySummary homology(const GradedChainComplex& c, const RingSpec& r) {
    return homology(specialize(c, r));
}

long HomologySummary::rank(int i, int j, int k) const {
    auto it = cells.find({i, j, k});
    return it == cells.end() ? 0 : it->second.rank;
}

long HomologySummary::rank_ij(int i, int j) const {
    long n = 0;
    for (const auto& [key, cell] : cells)
        if (key[0] == i && key[1] == j) n += cell.rank;
    return n;
}

long HomologySummary::total_rank() const {
    long n = 0;
    for (const auto& [key, cell] : cells) n += cell.rank;
    return n;
}

nlohmann::json HomologySummary::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, cell] : cells) {
        nlohmann::json tor = nlohmann::json::array();
        for (const auto& t : cell.torsion) tor.push_back(t.get_si());
        arr.push_back({{"i", key[0]}, {"j", key[1]}, {"k", key[2]}, {"rank", cell.rank}, {"torsion", tor}});
    }
    return arr;
}

HomologySummary HomologySummary::from_json(const nlohmann::json& j) {
    HomologySummary h;
    for (const auto& e : j) {
        Cell cell;
        cell.rank = e.at("rank").get<long>();
        for (const auto& t : e.at("torsion")) cell.torsion.emplace_back(t.get<long>());
        h.cells[{e.at("i").get<int>(), e.at("j").get<int>(), e.at("k").get<int>()}] = cell;
    }
    return h;
}

std::string poincare_table(const HomologySummary& h) {
    if (h.cells.empty()) return "";
    std::ostringstream os;
    os << std::setw(5) << "i" << std::setw(6) << "j" << std::setw(5) << "k" << std::setw(7) << "rank"
       << "  torsion\n";
    for (const auto& [key, cell] : h.cells) {
        os << std::setw(5) << key[0] << std::setw(6) << key[1] << std::setw(5) << key[2] << std::setw(7)
           << cell.rank << "  ";
        for (size_t t = 0; t < cell.torsion.size(); ++t)
            os << (t ? "," : "") << "Z/" << cell.torsion[t].get_str();
        os << "\n";
    }
    return os.str();
}

std::string poincare_csv(const HomologySummary& h) {
    std::ostringstream os;
    os << "i,j,k,rank,torsion\n";
    for (const auto& [key, cell] : h.cells) {
        os << key[0] << "," << key[1] << "," << key[2] << "," << cell.rank << ",";
        for (size_t t = 0; t < cell.torsion.size(); ++t) os << (t ? ";" : "") << cell.torsion[t].get_str();
        os << "\n";
    }
    return os.str();
}

int field_rank(const SparseMatrix<Scalar>& m, const RingSpec& r) {
    std::vector<int> rows(m.rows()), cols(m.cols());
    for (int i = 0; i < m.rows(); ++i) rows[i] = i;
    for (int i = 0; i < m.cols(); ++i) cols[i] = i;
    return with_field(r, [&](const auto& f) { return dense_rank(f, to_dense(f, m, rows, cols)); });
}

// ---------------------------------------------------------------- explicit bases

HomologyBasis homology_basis(const SpecializedComplex& c) {
    HomologyBasis hb;
    hb.ring = c.ring;
    with_field(c.ring, [&](const auto& f) {
        using FF = std::decay_t<decltype(f)>;
        for (const auto& [i, basis] : c.terms) {
            const int n = static_cast<int>(basis.size());
            std::vector<int> all_n(n), all_prev(c.dim(i - 1)), all_next(c.dim(i + 1));
            for (int x = 0; x < n; ++x) all_n[x] = x;
            for (int x = 0; x < c.dim(i - 1); ++x) all_prev[x] = x;
            for (int x = 0; x < c.dim(i + 1); ++x) all_next[x] = x;
            auto dn = to_dense(f, c.diff(i), all_next, all_n);
            auto kernel = dense_kernel(f, dn);
            auto dp = to_dense(f, c.diff(i - 1), all_n, all_prev);
            // Image vectors as rows.
            Dense<FF> img(dp.cols, n, f);
            for (int r = 0; r < dp.rows; ++r)
                for (int col = 0; col < dp.cols; ++col) img.at(col, r) = dp.at(r, col);
            QuotientMap<FF> qb(f, img);
            Dense<FF> proj(kernel.rows, qb.dim(), f);
            for (int r = 0; r < kernel.rows; ++r) {
                std::vector<typename FF::E> v(kernel.a.begin() + static_cast<long>(r) * n,
                                              kernel.a.begin() + static_cast<long>(r + 1) * n);
                auto p = qb.project(v);
                for (int col = 0; col < qb.dim(); ++col) proj.at(r, col) = p[col];
            }
            Dense<FF> track;
            auto piv = rref(f, proj, &track);
            auto& reps = hb.reps[i];
            auto& rows = hb.coord_rows[i];
            for (size_t t = 0; t < piv.size(); ++t) {
                std::vector<Scalar> rep(n, Scalar(0));
                for (int kr = 0; kr < kernel.rows; ++kr) {
                    auto coef = track.at(static_cast<int>(t), kr);
                    if (f.is_zero(coef)) continue;
                    for (int x = 0; x < n; ++x) {
                        auto cur = f.from(rep[x]);
                        rep[x] = f.to(f.add(cur, f.mul(coef, kernel.at(kr, x))));
                    }
                }
                reps.push_back(rep);
            }
            // Coordinate functional t: e_m -> project(e_m)[piv[t]].
            rows.assign(piv.size(), std::vector<Scalar>(n, Scalar(0)));
            for (int mcol = 0; mcol < n; ++mcol) {
                std::vector<typename FF::E> e(n, f.zero());
                e[mcol] = f.one();
                auto p = qb.project(e);
                for (size_t t = 0; t < piv.size(); ++t) rows[t][mcol] = f.to(p[piv[t]]);
            }
            if (reps.empty()) {
                hb.reps.erase(i);
                hb.coord_rows.erase(i);
            }
        }
        return 0;
    });
    return hb;
}

std::vector<Scalar> HomologyBasis::coords(int i, const std::vector<Scalar>& cycle) const {
    std::vector<Scalar> out;
    auto it = coord_rows.find(i);
    if (it == coord_rows.end()) return out;
    for (const auto& row : it->second) {
        Scalar acc = ring.from_int(0);
        for (size_t x = 0; x < row.size(); ++x)
            if (!ring.is_zero(row[x]) && !ring.is_zero(cycle[x])) acc = ring.add(acc, ring.mul(row[x], cycle[x]));
        out.push_back(acc);
    }
    return out;
}

SparseMatrix<Scalar> induced_map(const ChainMap& f, int i, const HomologyBasis& src, const HomologyBasis& dst) {
    const RingSpec& r = src.ring;
    auto comp = specialize(f.component(i), r);
    const int out_deg = i + f.ideg;
    SparseMatrix<Scalar> m(dst.dim(out_deg), src.dim(i));
    auto it = src.reps.find(i);
    if (it == src.reps.end()) return m;
    for (size_t c = 0; c < it->second.size(); ++c) {
        const auto& rep = it->second[c];
        std::vector<Scalar> image(comp.rows(), r.from_int(0));
        for (int row = 0; row < comp.rows(); ++row)
            for (const auto& [col, v] : comp.row(row))
                if (!r.is_zero(rep[col])) image[row] = r.add(image[row], r.mul(v, rep[col]));
        auto co = dst.coords(out_deg, image);
        for (size_t row = 0; row < co.size(); ++row) m.set(static_cast<int>(row), static_cast<int>(c), co[row], r);
    }
    return m;
}

// ---------------------------------------------------------------- workers

int worker_count() {
    const char* env = std::getenv("QAKH_WORKERS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace qakh
