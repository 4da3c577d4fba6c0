/**
 * @file hochschild.cpp
 * @brief Coinvariants, the coinvariant pipeline, truncated bar complexes, canonical basis map.
 */
#include "qakh/hochschild.hpp"

#include <bit>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qakh {

std::vector<Scalar> CoinvariantPresentation::project(std::vector<Scalar> v) const {
    for (size_t r = 0; r < pivots.size(); ++r) {
        Scalar c = v[pivots[r]];
        if (ring.is_zero(c)) continue;
        for (const auto& [k, x] : rref[r]) v[k] = ring.sub(v[k], ring.mul(c, x));
    }
    std::vector<Scalar> out(basis.size());
    for (size_t t = 0; t < basis.size(); ++t) out[t] = v[basis[t]];
    return out;
}

std::vector<std::vector<Scalar>> coinvariant_relations(const CKBimodule& m, bool twisted, const RingSpec& r) {
    if (m.m() != m.n()) throw std::invalid_argument("coinvariants need an (n,n) bimodule");
    const auto& A = m.top_algebra();
    std::vector<std::vector<Scalar>> rels;
    for (int a = 0; a < A.dimension(); ++a) {
        const int pa = twisted ? A.rho(a) : a;
        const Scalar qa = r.pow_q(-A.degree(a));
        for (int g = 0; g < m.size(); ++g) {
            std::vector<Scalar> v(m.size(), Scalar(0));
            bool any = false;
            for (auto [h, c] : m.left(pa, g)) {
                v[h] = r.add(v[h], r.mul(qa, r.from_int(BigInt(c))));
                any = true;
            }
            for (auto [h, c] : m.right(g, a)) {
                v[h] = r.sub(v[h], r.from_int(BigInt(c)));
                any = true;
            }
            if (any) rels.push_back(std::move(v));
        }
    }
    return rels;
}

CoinvariantPresentation coinv_q(const CKBimodule& m, bool twisted, const RingSpec& r) {
    if (!r.is_field()) throw RingError("coinvariants are computed over fields only, got " + r.name());
    auto rels = coinvariant_relations(m, twisted, r);
    CoinvariantPresentation p;
    p.ring = r;
    p.ambient = m.size();
    p.relation_count = static_cast<int>(rels.size());
    with_field(r, [&](auto f) {
        using F = decltype(f);
        Dense<F> R(static_cast<int>(rels.size()), p.ambient, f);
        for (size_t i = 0; i < rels.size(); ++i)
            for (int c = 0; c < p.ambient; ++c) R.at(static_cast<int>(i), c) = f.from(rels[i][c]);
        QuotientMap<F> qm(f, std::move(R));
        p.pivots = qm.pivots;
        p.basis = qm.free_cols;
        p.relation_rank = qm.relation_rank();
        p.rref.resize(p.pivots.size());
        for (size_t i = 0; i < p.pivots.size(); ++i)
            for (int c = 0; c < p.ambient; ++c)
                if (!f.is_zero(qm.red.at(static_cast<int>(i), c))) p.rref[i].push_back({c, f.to(qm.red.at(static_cast<int>(i), c))});
        return 0;
    });
    return p;
}

SpecializedComplex qhh_complex(const CKComplex& c, bool twisted, const RingSpec& r) {
    return coinvariant_complex(c, twisted, r).complex;
}

CoinvariantComplex coinvariant_complex(const CKComplex& c, bool twisted, const RingSpec& r) {
    const unsigned nv = 1u << c.crossings;
    CoinvariantComplex cc;
    auto& pres = cc.pres;
    pres.resize(nv);
    parallel_for(static_cast<int>(nv), [&](int mask) { pres[mask] = coinv_q(*c.vertices[mask], twisted, r); });

    SpecializedComplex& out = cc.complex;
    out.ring = r;
    auto& offset = cc.offset;
    offset.assign(nv, 0);
    std::map<int, int> fill;
    for (unsigned mask = 0; mask < nv; ++mask) {
        const int i = c.homological(mask);
        offset[mask] = fill[i];
        fill[i] += pres[mask].dim();
        auto& term = out.terms[i];
        for (int g : pres[mask].basis) {
            std::ostringstream name;
            for (int b = 0; b < c.crossings; ++b) name << (((mask >> b) & 1u) ? '1' : '0');
            name << ":" << c.vertices[mask]->module().name(g);
            term.push_back({c.quantum(mask, g), twisted ? 0 : c.weight(mask, g), name.str()});
        }
    }
    for (const auto& [i, b] : out.terms)
        if (out.terms.count(i + 1)) out.d[i] = SparseMatrix<Scalar>(out.dim(i + 1), out.dim(i));
    for (const auto& e : c.edges) {
        const unsigned to = e.from | (1u << e.bit);
        const auto& src = pres[e.from];
        const auto& dst = pres[to];
        auto& d = out.d[c.homological(e.from)];
        for (int t = 0; t < src.dim(); ++t) {
            const auto& col = e.map.cols[src.basis[t]];
            if (col.empty()) continue;
            std::vector<Scalar> v(dst.ambient, Scalar(0));
            for (auto [h, x] : col) v[h] = r.add(v[h], r.from_int(BigInt(e.sign * x)));
            auto coords = dst.project(std::move(v));
            for (int s = 0; s < dst.dim(); ++s)
                if (!r.is_zero(coords[s])) d.add(offset[to] + s, offset[e.from] + t, coords[s], r);
        }
    }
    return cc;
}

HomologySummary qhh_annular(const TangleWord& w, const RingSpec& r) {
    if (w.top() != w.bottom) throw ParseError(ParseError::Kind::Unclosable, "top and bottom strand counts differ");
    return homology(qhh_complex(ck_complex(w, Closure::Annular), false, r));
}

HomologySummary qhh_mobius(const TangleWord& w, const RingSpec& r) {
    if (w.top() != w.bottom) throw ParseError(ParseError::Kind::Unclosable, "top and bottom strand counts differ");
    if (w.bottom != 2 && w.bottom != 0) throw std::invalid_argument("Mobius pipeline supports 2-strand words only");
    return homology(qhh_complex(ck_complex(w, Closure::Mobius), true, r));
}

// ---------------------------------------------------------------- bar complex

namespace {

using Tensor = std::vector<int>;  // m, a_1, ..., a_k
using TensorVec = std::map<Tensor, Scalar>;

struct Bar {
    const ArcAlgebra& A;
    bool twisted;
    RingSpec r;

    void add(TensorVec& out, const Tensor& t, const Scalar& c) const {
        auto& s = out[t];
        s = r.add(s, c);
        if (r.is_zero(s)) out.erase(t);
    }

    // i-th face of a basis tensor, 0 <= i <= k
    TensorVec face(const Tensor& x, int i) const {
        const int k = static_cast<int>(x.size()) - 1;
        TensorVec out;
        if (i < k) {
            for (auto [z, c] : A.product(x[i], x[i + 1])) {
                Tensor y;
                y.reserve(k);
                for (int s = 0; s < i; ++s) y.push_back(x[s]);
                y.push_back(z);
                for (int s = i + 2; s <= k; ++s) y.push_back(x[s]);
                add(out, y, r.from_int(BigInt(c)));
            }
            return out;
        }
        const int a = x[k];
        const Scalar qa = r.pow_q(-A.degree(a));
        for (auto [z, c] : A.product(twisted ? A.rho(a) : a, x[0])) {
            Tensor y{z};
            for (int s = 1; s < k; ++s) y.push_back(x[s]);
            add(out, y, r.mul(qa, r.from_int(BigInt(c))));
        }
        return out;
    }

    TensorVec face(const TensorVec& v, int i) const {
        TensorVec out;
        for (const auto& [t, c] : v)
            for (const auto& [u, x] : face(t, i)) add(out, u, r.mul(c, x));
        return out;
    }
};

long ipow(long b, int e) {
    long out = 1;
    while (e-- > 0) out *= b;
    return out;
}

}  // namespace

TruncatedHH qhh_truncated(int n, bool twisted, const RingSpec& r, int N, long max_basis) {
    if (N < 1) throw std::invalid_argument("qhh_truncated: N must be positive");
    if (!r.is_field()) throw RingError("qhh_truncated requires a field");
    const auto& A = arc_algebra(n);
    const long d = A.dimension();
    long total = 0;
    for (int k = 0; k <= N; ++k) total += ipow(d, k + 1);
    if (total > max_basis)
        throw std::length_error("qhh_truncated: " + std::to_string(total) + " basis tensors exceed the limit");
    Bar bar{A, twisted, r};
    TruncatedHH out;
    out.n = n;
    out.N = N;

    auto decode = [&](long idx, int k) {
        Tensor t(k + 1);
        for (int s = 0; s <= k; ++s) {
            t[s] = static_cast<int>(idx % d);
            idx /= d;
        }
        return t;
    };
    auto encode = [&](const Tensor& t) {
        long idx = 0;
        for (int s = static_cast<int>(t.size()) - 1; s >= 0; --s) idx = idx * d + t[s];
        return idx;
    };

    SpecializedComplex cx;
    cx.ring = r;
    for (int k = 0; k <= N; ++k) {
        const long dim = ipow(d, k + 1);
        out.chain_dims[k] = dim;
        auto& term = cx.terms[-k];
        term.reserve(dim);
        for (long idx = 0; idx < dim; ++idx) {
            auto t = decode(idx, k);
            int deg = 0;
            for (int a : t) deg += A.degree(a);
            term.push_back({deg, 0, ""});
        }
    }
    for (int k = 1; k <= N; ++k) {
        const long dim = ipow(d, k + 1);
        SparseMatrix<Scalar> m(static_cast<int>(ipow(d, k)), static_cast<int>(dim));
        for (long idx = 0; idx < dim; ++idx) {
            auto t = decode(idx, k);
            for (int i = 0; i <= k; ++i) {
                const Scalar sign = r.from_int(BigInt(i % 2 ? -1 : 1));
                for (const auto& [u, c] : bar.face(t, i))
                    m.add(static_cast<int>(encode(u)), static_cast<int>(idx), r.mul(sign, c), r);
            }
        }
        cx.d[-k] = std::move(m);
    }
    auto h = homology(cx);
    for (int k = 0; k < N; ++k) out.homology[k] = 0;
    for (const auto& [key, cell] : h.cells)
        if (-key[0] < N) out.homology[-key[0]] += cell.rank;
    return out;
}

bool face_identities(int n, bool twisted, const RingSpec& r, int k, int samples, std::uint64_t seed, std::string* why) {
    const auto& A = arc_algebra(n);
    Bar bar{A, twisted, r};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, A.dimension() - 1);
    for (int s = 0; s < samples; ++s) {
        Tensor t(k + 1);
        for (auto& a : t) a = pick(rng);
        TensorVec x{{t, r.from_int(BigInt(1))}};
        for (int j = 1; j <= k; ++j)
            for (int i = 0; i < j; ++i) {
                auto lhs = bar.face(bar.face(x, j), i);
                auto rhs = bar.face(bar.face(x, i), j - 1);
                if (lhs != rhs) {
                    if (why) *why = "d_" + std::to_string(i) + " d_" + std::to_string(j) + " differs";
                    return false;
                }
            }
    }
    return true;
}

// ---------------------------------------------------------------- canonical basis

SparseMatrix<LaurentPoly> canonical_basis_map(int n) {
    auto diagrams = enumerate_cup_diagrams(n);
    const int dim = 1 << n;
    SparseMatrix<LaurentPoly> out(dim, static_cast<int>(diagrams.size()));
    auto bit = [&](int pos) { return 1 << (n - 1 - pos); };
    for (size_t col = 0; col < diagrams.size(); ++col) {
        const auto& c = diagrams[col];
        std::map<int, LaurentPoly> v{{0, LaurentPoly(1)}};
        for (int p = 0; p < n; ++p) {
            const int mt = c.match[p];
            std::map<int, LaurentPoly> next;
            if (mt == CupDiagram::kLeft || mt == CupDiagram::kRight) {
                for (auto& [idx, x] : v) next[mt == CupDiagram::kLeft ? idx | bit(p) : idx] = x;
            } else if (mt > p) {
                for (auto& [idx, x] : v) {
                    next[idx | bit(mt)] += x;                            // v+ (x) v-
                    next[idx | bit(p)] += x * LaurentPoly::q(-1);        // q^-1 v- (x) v+
                }
            } else {
                continue;
            }
            v = std::move(next);
        }
        for (auto& [idx, x] : v) out.add(idx, static_cast<int>(col), x, kPolyOps);
    }
    return out;
}

LaurentPoly determinant(const SparseMatrix<LaurentPoly>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix is not square");
    const int n = m.rows();
    if (n > 12) throw std::invalid_argument("determinant: matrix too large");
    // cofactor expansion along rows, columns tracked as a bitmask
    std::map<std::pair<int, unsigned>, LaurentPoly> memo;
    std::function<LaurentPoly(int, unsigned)> rec = [&](int row, unsigned used) -> LaurentPoly {
        if (row == n) return LaurentPoly(1);
        auto key = std::make_pair(row, used);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        LaurentPoly acc;
        for (const auto& [c, x] : m.row(row)) {
            if (used & (1u << c)) continue;
            int sign = (std::popcount(used & ((1u << c) - 1u)) % 2) ? -1 : 1;
            acc += x * rec(row + 1, used | (1u << c)) * LaurentPoly(sign);
        }
        memo[key] = acc;
        return acc;
    };
    return rec(0, 0);
}

bool idempotents_span_coinvariants(int n, bool twisted, const RingSpec& r) {
    const auto& A = arc_algebra(n);
    CKBimodule h(FlatTangle::identity(n));
    auto p = coinv_q(h, twisted, r);
    const auto& diagrams = A.module().bottoms();
    std::vector<std::vector<Scalar>> cols;
    for (int c = 0; c < static_cast<int>(diagrams.size()); ++c) {
        if (twisted && diagrams[c].reflected() != diagrams[c]) continue;
        std::vector<Scalar> v(p.ambient, Scalar(0));
        v[A.idempotent(c)] = r.from_int(BigInt(1));
        cols.push_back(p.project(std::move(v)));
    }
    if (static_cast<int>(cols.size()) != p.dim()) return false;
    SparseMatrix<Scalar> m(p.dim(), p.dim());
    for (int c = 0; c < p.dim(); ++c)
        for (int s = 0; s < p.dim(); ++s) m.set(s, c, cols[c][s], r);
    return field_rank(m, r) == p.dim();
}

}  // namespace qakh
