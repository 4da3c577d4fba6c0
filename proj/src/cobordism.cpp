/**
 * @file cobordism.cpp
 * @brief Gaussian elimination, clip maps, cabling, and the tangle action movie.
 */
#include "qakh/cobordism.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "qakh/ck_bimodule.hpp"
#include "qakh/tqft.hpp"

namespace qakh {

// ---------------------------------------------------------------- elimination

namespace {

struct PolyUnitOps {
    LaurentPoly add(const LaurentPoly& a, const LaurentPoly& b) const { return a + b; }
    LaurentPoly mul(const LaurentPoly& a, const LaurentPoly& b) const { return a * b; }
    LaurentPoly neg(const LaurentPoly& a) const { return -a; }
    bool is_zero(const LaurentPoly& a) const { return a.is_zero(); }
    bool is_unit(const LaurentPoly& a) const {
        if (!a.is_monomial()) return false;
        const auto& c = a.terms().begin()->second;
        return c == 1 || c == -1;
    }
    LaurentPoly inv(const LaurentPoly& a) const {
        const auto& [e, c] = *a.terms().begin();
        return LaurentPoly::monomial(-e, c);
    }
    LaurentPoly one() const { return LaurentPoly(1); }
};

struct FieldOps {
    RingSpec r;
    Scalar add(const Scalar& a, const Scalar& b) const { return r.add(a, b); }
    Scalar mul(const Scalar& a, const Scalar& b) const { return r.mul(a, b); }
    Scalar neg(const Scalar& a) const { return r.neg(a); }
    bool is_zero(const Scalar& a) const { return r.is_zero(a); }
    bool is_unit(const Scalar& a) const { return !r.is_zero(a); }
    Scalar inv(const Scalar& a) const { return r.inv(a); }
    Scalar one() const { return r.from_int(BigInt(1)); }
};

template <class T, class Ops>
void add_entry(std::map<int, T>& v, int k, const T& x, const Ops& ops) {
    if (ops.is_zero(x)) return;
    auto it = v.find(k);
    if (it == v.end()) {
        v.emplace(k, x);
        return;
    }
    it->second = ops.add(it->second, x);
    if (ops.is_zero(it->second)) v.erase(it);
}

template <class T, class Ops>
void axpy(std::map<int, T>& y, const T& a, const std::map<int, T>& x, const Ops& ops) {
    for (const auto& [k, v] : x) add_entry(y, k, ops.mul(a, v), ops);
}

template <class T, class Ops>
Reduction<T> eliminate(const ChainComplexT<T>& c, const KeepFn& keep, const Ops& ops, bool top_down, const PivotFn& allowed = nullptr) {
    using Vec = std::map<int, T>;
    struct Term {
        std::vector<Vec> out, in, pi, io;  // out[x]: d x in the next term; in[y]: sources of y
        std::vector<char> alive, keep;
    };
    std::map<int, Term> t;
    for (const auto& [i, basis] : c.terms) {
        auto& x = t[i];
        const int n = static_cast<int>(basis.size());
        x.out.resize(n);
        x.in.resize(n);
        x.pi.resize(n);
        x.io.resize(n);
        x.alive.assign(n, 1);
        x.keep.resize(n);
        for (int k = 0; k < n; ++k) {
            x.pi[k][k] = ops.one();
            x.io[k][k] = ops.one();
            x.keep[k] = keep(i, k) ? 1 : 0;
        }
    }
    for (const auto& [i, d] : c.d) {
        if (!t.count(i) || !t.count(i + 1)) continue;
        for (int r = 0; r < d.rows(); ++r)
            for (const auto& [cc, v] : d.row(r)) {
                t[i].out[cc][r] = v;
                t[i + 1].in[r][cc] = v;
            }
    }

    auto cancel = [&](int i, int b, int a) {
        auto& S = t.at(i);
        auto& U = t.at(i + 1);
        const T phi_inv = ops.inv(S.out[b].at(a));
        const Vec colb = S.out[b], rowa = U.in[a];
        for (const auto& [y, vyb] : colb) {
            if (y == a) continue;
            const T f = ops.neg(ops.mul(vyb, phi_inv));
            for (const auto& [x, vax] : rowa) {
                if (x == b) continue;
                const T delta = ops.mul(f, vax);
                add_entry(S.out[x], y, delta, ops);
                add_entry(U.in[y], x, delta, ops);
            }
            axpy(U.pi[y], f, U.pi[a], ops);
        }
        for (const auto& [x, vax] : rowa) {
            if (x == b) continue;
            axpy(S.io[x], ops.neg(ops.mul(phi_inv, vax)), S.io[b], ops);
        }
        for (const auto& [y, v] : S.out[b]) U.in[y].erase(b);
        for (const auto& [x, v] : U.in[a]) S.out[x].erase(a);
        if (auto it = t.find(i - 1); it != t.end())
            for (const auto& [z, v] : S.in[b]) it->second.out[z].erase(b);
        if (auto it = t.find(i + 2); it != t.end())
            for (const auto& [w, v] : U.out[a]) it->second.in[w].erase(a);
        S.out[b].clear();
        S.in[b].clear();
        S.pi[b].clear();
        S.io[b].clear();
        U.out[a].clear();
        U.in[a].clear();
        U.pi[a].clear();
        U.io[a].clear();
        S.alive[b] = 0;
        U.alive[a] = 0;
    };

    // Bottom-up column pivots first; rows from the top catch the cases where a
    // split has to be cancelled against the merge above it.
    auto sweep_columns = [&]() {
        bool any = false;
        for (auto& [i, S] : t) {
            auto nx = t.find(i + 1);
            if (nx == t.end()) continue;
            auto& U = nx->second;
            for (int b = 0; b < static_cast<int>(S.alive.size()); ++b) {
                if (!S.alive[b] || S.keep[b]) continue;
                int best = -1;
                size_t cost = SIZE_MAX;
                for (const auto& [y, v] : S.out[b]) {
                    if (U.keep[y] || !ops.is_unit(v) || (allowed && !allowed(i, b, y))) continue;
                    if (U.in[y].size() < cost) {
                        cost = U.in[y].size();
                        best = y;
                    }
                }
                if (best >= 0) {
                    cancel(i, b, best);
                    any = true;
                }
            }
        }
        return any;
    };
    auto sweep_rows = [&]() {
        bool any = false;
        for (auto it = t.rbegin(); it != t.rend(); ++it) {
            const int i = it->first - 1;
            auto pv = t.find(i);
            if (pv == t.end()) continue;
            auto& S = pv->second;
            auto& U = it->second;
            for (int a = 0; a < static_cast<int>(U.alive.size()); ++a) {
                if (!U.alive[a] || U.keep[a]) continue;
                int best = -1;
                size_t cost = SIZE_MAX;
                for (const auto& [x, v] : U.in[a]) {
                    if (S.keep[x] || !ops.is_unit(v) || (allowed && !allowed(i, x, a))) continue;
                    if (S.out[x].size() < cost) {
                        cost = S.out[x].size();
                        best = x;
                    }
                }
                if (best >= 0) {
                    cancel(i, best, a);
                    any = true;
                }
            }
        }
        return any;
    };
    if (top_down)
        while (sweep_rows()) {
        }
    while (sweep_columns()) {
    }

    Reduction<T> red;
    std::map<int, std::vector<int>> local;  // original index -> reduced index
    for (const auto& [i, S] : t) {
        auto& kept = red.kept[i];
        auto& loc = local[i];
        loc.assign(S.alive.size(), -1);
        for (int k = 0; k < static_cast<int>(S.alive.size()); ++k)
            if (S.alive[k]) {
                loc[k] = static_cast<int>(kept.size());
                kept.push_back(k);
                if (!S.keep[k]) ++red.leftover;
            }
        auto& basis = red.complex.terms[i];
        for (int k : kept) basis.push_back(c.basis(i)[k]);
    }
    for (const auto& [i, S] : t) {
        const auto& kept = red.kept[i];
        const int n = static_cast<int>(kept.size());
        const int N = static_cast<int>(S.alive.size());
        SparseMatrix<T> io(N, n), pi(n, N);
        for (int r = 0; r < n; ++r) {
            for (const auto& [o, v] : S.io[kept[r]]) io.set(o, r, v, ops);
            for (const auto& [o, v] : S.pi[kept[r]]) pi.set(r, o, v, ops);
        }
        red.iota[i] = std::move(io);
        red.pi[i] = std::move(pi);
        if (t.count(i + 1)) {
            SparseMatrix<T> d(static_cast<int>(red.kept[i + 1].size()), n);
            for (int r = 0; r < n; ++r)
                for (const auto& [y, v] : S.out[kept[r]]) d.set(local[i + 1][y], r, v, ops);
            red.complex.d[i] = std::move(d);
        }
    }
    return red;
}

}  // namespace

Reduction<LaurentPoly> gaussian_eliminate(const GradedChainComplex& c, const KeepFn& keep) {
    auto red = eliminate(c, keep, PolyUnitOps{}, false);
    return red.leftover ? eliminate(c, keep, PolyUnitOps{}, true) : red;
}

Reduction<LaurentPoly> gaussian_eliminate(const GradedChainComplex& c, const KeepFn& keep, const PivotFn& allowed) {
    return eliminate(c, keep, PolyUnitOps{}, true, allowed);
}

Reduction<Scalar> gaussian_eliminate(const SpecializedComplex& c, const KeepFn& keep) {
    if (!c.ring.is_field()) throw RingError("gaussian_eliminate over " + c.ring.name() + " needs a field");
    auto red = eliminate(c, keep, FieldOps{c.ring}, false);
    return red.leftover ? eliminate(c, keep, FieldOps{c.ring}, true) : red;
}

Reduction<Scalar> gaussian_eliminate(const SpecializedComplex& c, const KeepFn& keep, const PivotFn& allowed) {
    if (!c.ring.is_field()) throw RingError("gaussian_eliminate over " + c.ring.name() + " needs a field");
    return eliminate(c, keep, FieldOps{c.ring}, true, allowed);
}

// ---------------------------------------------------------------- clips

namespace {

std::string mask_part(const std::string& name) { return name.substr(0, name.find(':')); }
std::string label_part(const std::string& name) { return name.substr(name.find(':') + 1); }

/// Drops the mask characters at the given crossing indices and (optionally) one label factor.
std::string reduce_name(const std::string& name, const std::vector<int>& drop_bits, int drop_factor = -1) {
    std::string mask = mask_part(name), labels = label_part(name);
    std::string m2;
    for (int c = 0; c < static_cast<int>(mask.size()); ++c)
        if (std::find(drop_bits.begin(), drop_bits.end(), c) == drop_bits.end()) m2 += mask[c];
    if (drop_factor >= 0) {
        labels.erase(static_cast<size_t>(2 * drop_factor), 2);
        if (labels.empty()) labels = "1";
    }
    return m2 + ":" + labels;
}

int crossings_before(const TangleWord& w, int slice) {
    int n = 0;
    for (int s = 0; s < slice && s < static_cast<int>(w.slices.size()); ++s) n += w.slices[s].is_crossing();
    return n;
}

TangleWord with_inserted(const TangleWord& w, int at, const std::vector<Slice>& add) {
    if (at < 0 || at > static_cast<int>(w.slices.size())) throw std::invalid_argument("clip: slice index out of range");
    TangleWord out = w;
    out.slices.insert(out.slices.begin() + at, add.begin(), add.end());
    return out;
}

TangleWord with_erased(const TangleWord& w, int at, int count) {
    if (at < 0 || at + count > static_cast<int>(w.slices.size()))
        throw std::invalid_argument("clip: slice index out of range");
    TangleWord out = w;
    out.slices.erase(out.slices.begin() + at, out.slices.begin() + at + count);
    return out;
}

bool slice_is(const TangleWord& w, int at, SliceKind k, int pos) {
    return at >= 0 && at < static_cast<int>(w.slices.size()) && w.slices[at].kind == k && w.slices[at].pos == pos;
}

SliceKind other(SliceKind k) { return k == SliceKind::Pos ? SliceKind::Neg : SliceKind::Pos; }

std::pair<int, int> shifts(const TangleWord& w) {
    auto [np, nm] = crossing_counts(w, Geometry::Annulus);
    return {-nm, np - 2 * nm};
}

/// Index of the factor holding the own loop through `node` (factor 0 = most significant bit).
int loop_factor(const FlatVertex& v, int node) {
    auto it = std::find(v.own_loops.begin(), v.own_loops.end(), node);
    if (it == v.own_loops.end()) throw std::logic_error("clip: inserted circle not found among own loops");
    return v.essential + static_cast<int>(v.object_loops.size()) + static_cast<int>(it - v.own_loops.begin());
}

int insert_bit(int idx, int f, int p, int bit) {
    const int low = f - p;  // source bits below the inserted factor
    const int hi = idx >> low, lo = idx & ((1 << low) - 1);
    return (((hi << 1) | bit) << low) | lo;
}

SparseMatrix<LaurentPoly> diag_scale(const SparseMatrix<LaurentPoly>& m, const std::vector<LaurentPoly>& u, bool left) {
    SparseMatrix<LaurentPoly> out(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (const auto& [c, v] : m.row(r)) out.set(r, c, v * (left ? u[r] : u[c]), kPolyOps);
    return out;
}

/// Units u with d_red(y, x) u_x = u_y d_small(y, x); empty map on failure.
std::map<int, std::vector<LaurentPoly>> match_units(const GradedChainComplex& red, const GradedChainComplex& small,
                                                    std::string* why) {
    PolyUnitOps ops;
    std::map<int, std::vector<LaurentPoly>> u;
    std::map<int, std::vector<char>> set;
    for (const auto& [i, b] : red.terms) {
        u[i].assign(b.size(), LaurentPoly(1));
        set[i].assign(b.size(), 0);
    }
    auto ratio = [&](const LaurentPoly& a, const LaurentPoly& b, LaurentPoly& out) {
        // a = out * b with out a unit
        if (a.is_zero() || b.is_zero()) return false;
        const auto& [ea, ca] = *a.terms().begin();
        const auto& [eb, cb] = *b.terms().begin();
        if (ca != cb && ca != -cb) return false;
        out = LaurentPoly::monomial(ea - eb, ca == cb ? 1 : -1);
        return out * b == a;
    };
    // breadth-first propagation over the bipartite graph of nonzero entries
    std::vector<std::pair<int, int>> queue;
    auto visit = [&](int i, int x) {
        if (set[i][x]) return;
        set[i][x] = 1;
        queue.push_back({i, x});
    };
    for (auto& [i0, flags] : set)
        for (int x0 = 0; x0 < static_cast<int>(flags.size()); ++x0) {
            if (flags[x0]) continue;
            visit(i0, x0);
            while (!queue.empty()) {
                auto [i, x] = queue.back();
                queue.pop_back();
                auto dr = red.diff(i), ds = small.diff(i);
                for (int y = 0; y < dr.rows(); ++y) {
                    auto v = dr.get(y, x);
                    if (v.is_zero() || set[i + 1][y]) continue;
                    LaurentPoly rt;  // u_y = d_red u_x / d_small
                    if (!ratio(v * u[i][x], ds.get(y, x), rt)) continue;
                    u[i + 1][y] = rt;
                    visit(i + 1, y);
                }
                if (red.terms.count(i - 1)) {
                    auto dr0 = red.diff(i - 1), ds0 = small.diff(i - 1);
                    const auto& row = dr0.row(x);
                    for (const auto& [z, v] : row) {
                        if (set[i - 1][z]) continue;
                        LaurentPoly rt;  // u_z: d_red(x,z) u_z = u_x d_small(x,z)
                        if (!ratio(u[i][x] * ds0.get(x, z), v, rt)) continue;
                        u[i - 1][z] = rt;
                        visit(i - 1, z);
                    }
                }
            }
        }
    for (const auto& [i, b] : red.terms) {
        auto dr = red.diff(i), ds = small.diff(i);
        if (dr.rows() != ds.rows() || dr.cols() != ds.cols()) {
            if (why) *why = "differential shapes differ in degree " + std::to_string(i);
            return {};
        }
        for (int y = 0; y < dr.rows(); ++y) {
            for (const auto& [x, v] : dr.row(y))
                if (v * u[i][x] != u[i + 1][y] * ds.get(y, x)) {
                    if (why) *why = "reduced differential does not match in degree " + std::to_string(i);
                    return {};
                }
            for (const auto& [x, v] : ds.row(y))
                if (dr.get(y, x).is_zero()) {
                    if (why) *why = "reduced differential misses an entry in degree " + std::to_string(i);
                    return {};
                }
        }
    }
    (void)ops;
    return u;
}

ChainMap r_move_map(const TangleWord& src, const MovieClip& c) {
    const bool insert = !c.inverse;
    const TangleWord big = insert ? apply_clip(src, c) : src;
    const TangleWord small = insert ? src : apply_clip(src, c);
    const int cidx = crossings_before(big, c.slice);
    auto C = build_complex(big);
    auto S = build_complex(small);
    std::vector<int> bits{cidx};
    if (c.kind == ClipKind::R2) bits.push_back(cidx + 1);

    // R1: the kink circle lives in the vertex where the kink crossing is vertical;
    // keep the label that survives the merge (w-) or the split (w+).
    const bool r1 = c.kind == ClipKind::R1;
    BracketData bd;
    if (r1) bd = build_bracket(big);
    const int m = big.crossing_count();
    const SliceKind kink = r1 ? big.slices[c.slice + 1].kind : SliceKind::Pos;
    auto factor_of = [&](unsigned mask) { return loop_factor(bd.vertices[mask], bd.vertices[mask].rg.node(c.slice + 1, c.pos)); };

    auto keep = [&](int i, int x) {
        const std::string mk = mask_part(C.basis(i)[x].name);
        for (int b : bits)
            if (!smoothing_is_vertical(big, b, mk[b] - '0')) return false;
        if (!r1) return true;
        unsigned mask = 0;
        for (int b = 0; b < m; ++b)
            if (mk[b] == '1') mask |= 1u << b;
        const auto& v = bd.vertices[mask];
        const int p = factor_of(mask);
        const int idx = x - bd.offset[mask];
        const bool minus = (idx >> (v.factors() - 1 - p)) & 1;
        return kink == SliceKind::Pos ? minus : !minus;
    };
    // R2: the circle at the both-turned vertex pairs with the split below when
    // labelled w- and with the merge above when labelled w+.
    BracketData bd2;
    auto r2_class = [&](int i, int x) {
        const std::string mk = mask_part(C.basis(i)[x].name);
        if (mk[cidx] == mk[cidx + 1]) return mk[cidx] == '1' ? 3 : 0;
        unsigned mask = 0;
        for (int b = 0; b < m; ++b)
            if (mk[b] == '1') mask |= 1u << b;
        const auto& v = bd2.vertices[mask];
        const int p = loop_factor(v, v.rg.node(c.slice + 1, c.pos - 1));
        return ((x - bd2.offset[mask]) >> (v.factors() - 1 - p)) & 1 ? 1 : 2;
    };
    PivotFn allowed = nullptr;
    if (!r1) {
        bd2 = build_bracket(big);
        allowed = [&](int i, int b, int a) {
            const int cb = r2_class(i, b), ca = r2_class(i + 1, a);
            return (cb == 0 && ca == 1) || (cb == 2 && ca == 3);
        };
    }
    auto red = allowed ? gaussian_eliminate(C, keep, allowed) : gaussian_eliminate(C, keep);
    if (red.leftover) throw std::logic_error("R-move: " + std::to_string(red.leftover) + " generators left after elimination");
    for (const auto& [i, b] : red.complex.terms) {
        if (S.dim(i) != static_cast<int>(b.size()))
            throw std::logic_error("R-move: reduced complex has the wrong size in degree " + std::to_string(i));
        for (size_t x = 0; x < b.size(); ++x) {
            int drop = -1;
            if (r1) {
                unsigned mask = 0;
                const std::string mk = mask_part(b[x].name);
                for (int t = 0; t < m; ++t)
                    if (mk[t] == '1') mask |= 1u << t;
                drop = factor_of(mask);
            }
            const auto& sb = S.basis(i)[x];
            if (reduce_name(b[x].name, bits, drop) != sb.name || b[x].j != sb.j || b[x].k != sb.k)
                throw std::logic_error("R-move: basis mismatch " + b[x].name + " vs " + sb.name);
        }
    }
    for (const auto& [i, b] : S.terms)
        if (!red.complex.terms.count(i) && !b.empty()) throw std::logic_error("R-move: degree missing after reduction");
    std::string why;
    auto u = match_units(red.complex, S, &why);
    if (u.empty() && !S.terms.empty()) throw std::logic_error("R-move: " + why);

    ChainMap f;
    if (insert) {
        f.source = S;
        f.target = C;
        for (const auto& [i, b] : S.terms) f.f[i] = diag_scale(red.iota.at(i), u[i], false);
    } else {
        f.source = C;
        f.target = S;
        for (const auto& [i, b] : S.terms) {
            std::vector<LaurentPoly> inv(u[i].size());
            for (size_t x = 0; x < inv.size(); ++x) inv[x] = PolyUnitOps{}.inv(u[i][x]);
            f.f[i] = diag_scale(red.pi.at(i), inv, true);
        }
    }
    return f;
}

ChainMap circle_map(const TangleWord& src, const MovieClip& c) {
    const bool cup = c.kind == ClipKind::Cup;
    const TangleWord big = cup ? apply_clip(src, c) : src;
    const TangleWord small = cup ? src : apply_clip(src, c);
    auto bb = build_bracket(big), bs = build_bracket(small);
    auto [di, dj] = shifts(small);
    ChainMap f;
    f.source = build_complex(src);
    f.target = build_complex(cup ? big : small);
    f.jdeg = 1;
    for (const auto& [i, b] : f.source.terms) f.f[i] = SparseMatrix<LaurentPoly>(f.target.dim(i), f.source.dim(i));
    const unsigned nv = static_cast<unsigned>(bs.vertices.size());
    for (unsigned mask = 0; mask < nv; ++mask) {
        const auto& vb = bb.vertices[mask];
        const auto& vs = bs.vertices[mask];
        const int p = loop_factor(vb, vb.rg.node(c.slice + 1, c.pos - 1));
        const int i = std::popcount(mask) + di;
        auto& blk = f.f[i];
        for (int idx = 0; idx < vs.dim(); ++idx) {
            if (cup) {
                blk.add(bb.offset[mask] + insert_bit(idx, vs.factors(), p, 0), bs.offset[mask] + idx, LaurentPoly(1), kPolyOps);
            } else {
                blk.add(bs.offset[mask] + idx, bb.offset[mask] + insert_bit(idx, vs.factors(), p, 1), LaurentPoly(1), kPolyOps);
            }
        }
    }
    (void)dj;
    return f;
}

ChainMap saddle_clip(const TangleWord& w, const MovieClip& c) {
    const auto& sl = w.slices.at(c.slice);
    TangleWord wc = w;
    wc.slices[c.slice].kind = sl.kind == SliceKind::Vert ? SliceKind::Pos : SliceKind::Neg;
    const int cidx = crossings_before(wc, c.slice);
    auto vd = viro_saddle(wc, cidx);
    if (!(vd.d0 == w)) throw std::logic_error("saddle clip: resolved word does not match the source");
    auto [di0, dj0] = shifts(vd.d0);
    auto [di1, dj1] = shifts(vd.d1);
    ChainMap f;
    f.source = shift(vd.saddle.source, di0, dj0);
    f.target = shift(vd.saddle.target, di1, dj1);
    f.ideg = di1 - di0;
    f.jdeg = -1 + dj1 - dj0;
    for (const auto& [i, m] : vd.saddle.f) f.f[i + di0] = m;
    return f;
}

}  // namespace

std::string MovieClip::describe() const {
    static const char* names[] = {"saddle", "cup", "cap", "R1", "R2", "R3"};
    std::ostringstream os;
    os << names[static_cast<int>(kind)] << (inverse ? "^-1" : "") << "@" << slice << ":" << pos;
    if (kind == ClipKind::R1 || kind == ClipKind::R2) os << (sign > 0 ? "+" : "-");
    return os.str();
}

int CobordismDegree::value() const {
    if (corners % 4) throw std::logic_error("cobordism degree: corner count not divisible by 4");
    return euler - corners / 4 - 2 * dots;
}

CobordismDegree clip_degree(const MovieClip& c) {
    CobordismDegree d;
    switch (c.kind) {
        case ClipKind::Saddle: d.euler = -1; break;
        case ClipKind::Cup:
        case ClipKind::Cap: d.euler = 1; break;
        default: d.euler = 0; break;  // R-moves are isotopies
    }
    return d;
}

TangleWord apply_clip(const TangleWord& w, const MovieClip& c) {
    const int L = static_cast<int>(w.slices.size());
    auto widths = w.widths();
    auto bad = [&](const std::string& why) { return std::invalid_argument("clip " + c.describe() + " does not apply: " + why); };
    switch (c.kind) {
        case ClipKind::Saddle: {
            if (c.slice < 0 || c.slice >= L) throw bad("no such slice");
            auto k = w.slices[c.slice].kind;
            if (k != SliceKind::Vert && k != SliceKind::Turn) throw bad("slice is not a frozen smoothing");
            TangleWord out = w;
            out.slices[c.slice].kind = k == SliceKind::Vert ? SliceKind::Turn : SliceKind::Vert;
            return out;
        }
        case ClipKind::Cup:
            if (c.slice < 0 || c.slice > L || c.pos < 1 || c.pos > widths[c.slice] + 1) throw bad("position out of range");
            return with_inserted(w, c.slice, {{SliceKind::Cup, c.pos, 0}, {SliceKind::Cap, c.pos, 0}});
        case ClipKind::Cap:
            if (!slice_is(w, c.slice, SliceKind::Cup, c.pos) || !slice_is(w, c.slice + 1, SliceKind::Cap, c.pos))
                throw bad("no small circle there");
            return with_erased(w, c.slice, 2);
        case ClipKind::R1: {
            const SliceKind x = c.sign > 0 ? SliceKind::Pos : SliceKind::Neg;
            if (c.inverse) {
                if (!slice_is(w, c.slice, SliceKind::Cup, c.pos + 1) || !slice_is(w, c.slice + 1, x, c.pos) ||
                    !slice_is(w, c.slice + 2, SliceKind::Cap, c.pos + 1))
                    throw bad("no kink there");
                return with_erased(w, c.slice, 3);
            }
            if (c.slice < 0 || c.slice > L || c.pos < 1 || c.pos > widths[c.slice]) throw bad("position out of range");
            int orient = 0;
            if (!has_frozen_turnbacks(w)) orient = point_orientations(w, Closure::None)[c.slice][c.pos - 1];
            return with_inserted(w, c.slice, {{SliceKind::Cup, c.pos + 1, orient}, {x, c.pos, 0}, {SliceKind::Cap, c.pos + 1, 0}});
        }
        case ClipKind::R2: {
            const SliceKind x = c.sign > 0 ? SliceKind::Pos : SliceKind::Neg;
            if (c.inverse) {
                if (!slice_is(w, c.slice, x, c.pos) || !slice_is(w, c.slice + 1, other(x), c.pos)) throw bad("no R2 pair there");
                return with_erased(w, c.slice, 2);
            }
            if (c.slice < 0 || c.slice > L || c.pos < 1 || c.pos + 1 > widths[c.slice]) throw bad("position out of range");
            return with_inserted(w, c.slice, {{x, c.pos, 0}, {other(x), c.pos, 0}});
        }
        case ClipKind::R3: throw bad("R3 clips are not supported; compose R2 and saddle clips instead");
    }
    throw bad("unknown clip");
}

ChainMap clip_map(const TangleWord& w, const MovieClip& c) {
    apply_clip(w, c);  // validates
    switch (c.kind) {
        case ClipKind::Saddle: return saddle_clip(w, c);
        case ClipKind::Cup:
        case ClipKind::Cap: return circle_map(w, c);
        case ClipKind::R1:
        case ClipKind::R2: return r_move_map(w, c);
        default: break;
    }
    throw std::invalid_argument("clip_map: unsupported clip");
}

ChainMap compose(const ChainMap& second, const ChainMap& first) {
    ChainMap out;
    out.source = first.source;
    out.target = second.target;
    out.ideg = first.ideg + second.ideg;
    out.jdeg = first.jdeg + second.jdeg;
    out.kdeg = first.kdeg + second.kdeg;
    for (const auto& [i, b] : first.source.terms)
        out.f[i] = mat_mul(second.component(i + first.ideg), first.component(i), kPolyOps);
    return out;
}

SparseMatrix<Scalar> homology_map(const ChainMap& f, int i, const RingSpec& r) {
    auto hs = homology_basis(specialize(f.source, r));
    auto ht = homology_basis(specialize(f.target, r));
    return induced_map(f, i, hs, ht);
}

// ---------------------------------------------------------------- cabling

Cable cable(const TangleWord& w, int k, const std::vector<int>& eps) {
    if (w.bottom != 1 || w.top() != 1) throw std::invalid_argument("cable: expected a (1,1) tangle word");
    if (k < 1) throw std::invalid_argument("cable: k must be positive");
    if (static_cast<int>(eps.size()) != k) throw std::invalid_argument("cable: need one sign per copy");
    Cable out;
    out.k = k;
    out.eps = eps;
    out.flips = static_cast<int>(std::count(eps.begin(), eps.end(), -1));
    out.writhe = w.crossing_count() ? writhe(w) : 0;
    const int o0 = w.bottom_orient.empty() ? 1 : w.bottom_orient[0];
    auto& cw = out.word;
    cw.bottom = k;
    for (int a = 0; a < k; ++a) cw.bottom_orient.push_back(o0 * eps[a]);
    for (const auto& sl : w.slices) {
        const int base = k * (sl.pos - 1);
        switch (sl.kind) {
            case SliceKind::Pos:
            case SliceKind::Neg:
                // left bundle passes through the right one strand by strand, rightmost first
                for (int a = k - 1; a >= 0; --a)
                    for (int s = 0; s < k; ++s) cw.slices.push_back({sl.kind, base + 1 + a + s, 0});
                break;
            case SliceKind::Cup:
                for (int a = 0; a < k; ++a) cw.slices.push_back({SliceKind::Cup, base + 1 + a, 0});
                break;
            case SliceKind::Cap:
                for (int a = k - 1; a >= 0; --a) cw.slices.push_back({SliceKind::Cap, base + 1 + a, 0});
                break;
            default: throw std::invalid_argument("cable: frozen smoothings cannot be cabled");
        }
    }
    return out;
}

// ---------------------------------------------------------------- tangle action

namespace {

using DegMap = std::map<int, SparseMatrix<Scalar>>;

struct CkData {
    TangleWord w;
    CKComplex ck;
    CoinvariantComplex cc;
};

class CkCache {
public:
    explicit CkCache(RingSpec r) : r_(std::move(r)) {}
    std::shared_ptr<const CkData> get(const TangleWord& w) {
        const std::string key = w.to_string();
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto d = std::make_shared<CkData>();
        d->w = w;
        d->ck = ck_complex(w, Closure::Annular);
        d->cc = coinvariant_complex(d->ck, false, r_);
        cache_[key] = d;
        return d;
    }

private:
    RingSpec r_;
    std::map<std::string, std::shared_ptr<const CkData>> cache_;
};

DegMap zero_map(const SpecializedComplex& from, const SpecializedComplex& to) {
    DegMap out;
    for (const auto& [i, b] : from.terms) out[i] = SparseMatrix<Scalar>(to.dim(i), from.dim(i));
    return out;
}

void check_chain_map(const DegMap& f, const SpecializedComplex& a, const SpecializedComplex& b, const std::string& what) {
    const auto& r = a.ring;
    for (const auto& [i, fi] : f) {
        auto next = f.find(i + 1);
        SparseMatrix<Scalar> lhs = next == f.end() ? SparseMatrix<Scalar>(b.dim(i + 1), a.dim(i + 1)) : next->second;
        auto l = mat_mul(lhs, a.diff(i), r);
        auto rr = mat_mul(b.diff(i), fi, r);
        if (!(l == rr)) throw std::logic_error(what + ": not a chain map in degree " + std::to_string(i));
    }
}

/// R2 pair at crossings (cidx, cidx + 1) of big; the kept vertices are identified with small.
/// Vertex mask of every generator of the bimodule complex, by degree.
std::map<int, std::vector<unsigned>> owners(const CKComplex& ck) {
    std::map<int, std::vector<unsigned>> out;
    for (unsigned mask = 0; mask < (1u << ck.crossings); ++mask) {
        auto& v = out[ck.homological(mask)];
        v.resize(std::max<size_t>(v.size(), ck.offset[mask] + ck.vertices[mask]->module().size()));
        for (int g = 0; g < ck.vertices[mask]->module().size(); ++g) v[ck.offset[mask] + g] = mask;
    }
    return out;
}

/// Pushes a degreewise map of bimodule complexes down to termwise coinvariants,
/// checking that relations go to relations.
DegMap push_down(const std::map<int, SparseMatrix<Scalar>>& m, const CkData& src, const CkData& dst, const RingSpec& r) {
    DegMap out = zero_map(src.cc.complex, dst.cc.complex);
    auto own = owners(dst.ck);
    for (const auto& [i, mi] : m) {
        std::vector<std::vector<std::pair<int, Scalar>>> cols(mi.cols());
        for (int row = 0; row < mi.rows(); ++row)
            for (const auto& [c, v] : mi.row(row)) cols[c].push_back({row, v});
        // image of an ambient vector of vertex ms, in coinvariant coordinates of dst
        auto image = [&](unsigned ms, const std::vector<Scalar>& amb) {
            std::map<unsigned, std::vector<Scalar>> parts;
            for (size_t g = 0; g < amb.size(); ++g) {
                if (r.is_zero(amb[g])) continue;
                for (const auto& [row, v] : cols[src.ck.offset[ms] + g]) {
                    const unsigned md = own.at(i)[row];
                    auto& part = parts[md];
                    if (part.empty()) part.assign(dst.ck.vertices[md]->module().size(), Scalar(0));
                    auto& e = part[row - dst.ck.offset[md]];
                    e = r.add(e, r.mul(v, amb[g]));
                }
            }
            std::vector<std::pair<int, Scalar>> res;
            for (auto& [md, part] : parts) {
                auto coords = dst.cc.pres[md].project(std::move(part));
                for (size_t s2 = 0; s2 < coords.size(); ++s2)
                    if (!r.is_zero(coords[s2])) res.push_back({dst.cc.offset[md] + static_cast<int>(s2), coords[s2]});
            }
            return res;
        };
        for (unsigned ms = 0; ms < (1u << src.ck.crossings); ++ms) {
            if (src.ck.homological(ms) != i) continue;
            const auto& pres = src.cc.pres[ms];
            const int amb = src.ck.vertices[ms]->module().size();
            for (int s = 0; s < pres.dim(); ++s) {
                std::vector<Scalar> e(amb, Scalar(0));
                e[pres.basis[s]] = r.from_int(BigInt(1));
                for (const auto& [row, v] : image(ms, e)) out.at(i).add(row, src.cc.offset[ms] + s, v, r);
            }
            for (const auto& rel : coinvariant_relations(*src.ck.vertices[ms], false, r))
                if (!image(ms, rel).empty()) throw std::logic_error("R2: map does not descend to coinvariants");
        }
    }
    return out;
}

/// R2 pair at crossings (cidx, cidx + 1) of big, eliminated on the bimodule complex
/// (where the small circle deloops) onto the vertices where both new crossings are vertical.
DegMap r2_map(const CkData& big, const CkData& small, int cidx, bool insert, const RingSpec& r) {
    const auto C = specialize(big.ck.complex(), r);
    const auto S = specialize(small.ck.complex(), r);
    auto pair_bits = [&](const std::string& mk) {
        return std::pair<bool, bool>{smoothing_is_vertical(big.w, cidx, mk[cidx] - '0'),
                                     smoothing_is_vertical(big.w, cidx + 1, mk[cidx + 1] - '0')};
    };
    auto keep = [&](int i, int x) {
        auto [v0, v1] = pair_bits(mask_part(C.basis(i)[x].name));
        return v0 && v1;
    };
    // Class of a non-kept generator: 0 = (v,t) below the circle, 1 / 2 = circle
    // vertex with the circle dotted / undotted, 3 = (t,v) above it.
    int slice = -1;
    for (int s = 0, c = 0; s < static_cast<int>(big.w.slices.size()); ++s)
        if (big.w.slices[s].is_crossing() && c++ == cidx) slice = s;
    const int cpos = big.w.slices[slice].pos - 1;
    auto owner = owners(big.ck);
    auto cls = [&](int i, int x) {
        const std::string mk = mask_part(C.basis(i)[x].name);
        if (mk[cidx] == mk[cidx + 1]) return mk[cidx] == '1' ? 3 : 0;
        const unsigned mask = owner.at(i)[x];
        std::vector<int> xi(big.ck.crossings);
        for (int b = 0; b < big.ck.crossings; ++b) xi[b] = (mask >> b) & 1u;
        const int node = resolution_graph(big.w, xi, Closure::None).node(slice + 1, cpos);
        const auto& mod = big.ck.vertices[mask]->module();
        const auto& g = mod.gen(x - big.ck.offset[mask]);
        // free components are ranked the same way on the uncontracted resolution
        const auto& t = big.ck.resolutions[mask];
        auto cl = build_closure(t, mod.bottoms()[g.bottom], mod.tops()[g.top], std::max(t.m, t.n));
        const int rank = cl.free_rank[cl.comp[cl.tangle_node[node]]];
        if (rank < 0) throw std::logic_error("R2: circle is not a free component");
        return ((g.dots >> rank) & 1u) ? 1 : 2;
    };
    std::map<int, std::vector<int>> klass;
    for (const auto& [i, b] : C.terms) {
        auto& k = klass[i];
        k.assign(b.size(), -1);
        for (int x = 0; x < static_cast<int>(b.size()); ++x)
            if (!keep(i, x)) k[x] = cls(i, x);
    }
    auto allowed = [&](int i, int b, int a) {
        const int cb = klass.at(i)[b], ca = klass.at(i + 1)[a];
        return (cb == 0 && ca == 1) || (cb == 2 && ca == 3);
    };
    auto red = gaussian_eliminate(C, keep, allowed);
    if (red.leftover) throw std::logic_error("R2: elimination incomplete");
    for (const auto& [i, b] : red.complex.terms) {
        if (S.dim(i) != static_cast<int>(b.size())) throw std::logic_error("R2: size mismatch");
        for (size_t x = 0; x < b.size(); ++x)
            if (reduce_name(b[x].name, {cidx, cidx + 1}) != S.basis(i)[x].name || b[x].j != S.basis(i)[x].j)
                throw std::logic_error("R2: basis mismatch at " + b[x].name);
        if (!(red.complex.diff(i) == S.diff(i)))
            throw std::logic_error("R2: reduced differential differs in degree " + std::to_string(i));
    }
    return insert ? push_down(red.iota, small, big, r) : push_down(red.pi, big, small, r);
}

DegMap rotation_map(const CkData& from, const CkData& to, const RingSpec& r) {
    const TangleWord& w = from.w;
    if (w.slices.empty() || !w.slices[0].is_crossing()) throw std::invalid_argument("rotation: first slice must be a crossing");
    const int n = w.crossing_count();
    TangleWord a;
    a.bottom = w.bottom;
    a.slices = {w.slices[0]};
    if (w.slices.size() < 2) throw std::invalid_argument("rotation: word needs at least two slices");
    TangleWord b;
    b.bottom = w.widths()[1];
    b.slices.assign(w.slices.begin() + 1, w.slices.end());
    const int signA = crossing_signs(w, Closure::Annular)[0];
    const int negA = signA < 0 ? 1 : 0;
    const int negB = from.ck.n_minus - negA;

    DegMap out = zero_map(from.cc.complex, to.cc.complex);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const int x0 = mask & 1u;
        std::vector<int> xib;
        for (int c = 1; c < n; ++c) xib.push_back((mask >> c) & 1u);
        const unsigned mask2 = (mask >> 1) | (static_cast<unsigned>(x0) << (n - 1));
        std::vector<int> xi(n), xi2(n);
        for (int c = 0; c < n; ++c) {
            xi[c] = (mask >> c) & 1u;
            xi2[c] = (mask2 >> c) & 1u;
        }
        auto rw = resolution_graph(w, xi, Closure::None);
        auto rw2 = resolution_graph(to.w, xi2, Closure::None);
        // Uncontracted pieces glued straight into the resolutions of w and of the
        // rotated word, so circles keep the order used by the vertex modules.
        auto ra = resolution_graph(a, {x0}, Closure::None);
        auto rb = resolution_graph(b, xib, Closure::None);
        DiagramModule MA(FlatTangle::from_resolution(ra));
        DiagramModule MB(FlatTangle::from_resolution(rb));
        const int L = static_cast<int>(b.slices.size());
        std::vector<int> amap(MA.tangle().nodes, -1), bmap(MB.tangle().nodes, -1);
        std::vector<int> amap2(MA.tangle().nodes, -1), bmap2(MB.tangle().nodes, -1);
        for (int l = 0; l <= 1; ++l)
            for (int p = 0; p < ra.widths[l]; ++p) {
                amap[ra.node(l, p)] = rw.node(l, p);
                amap2[ra.node(l, p)] = rw2.node(L + l, p);
            }
        for (int l = 0; l <= L; ++l)
            for (int p = 0; p < rb.widths[l]; ++p) {
                bmap[rb.node(l, p)] = rw.node(l + 1, p);
                bmap2[rb.node(l, p)] = rw2.node(l, p);
            }
        DiagramModule T(from.ck.resolutions[mask]);
        DiagramModule T2(to.ck.resolutions[mask2]);
        const auto& V = from.ck.vertices[mask]->module();
        const auto& V2 = to.ck.vertices[mask2]->module();
        auto matcher = [](const DiagramModule& src, const DiagramModule& dst) {
            if (src.size() != dst.size()) throw std::logic_error("rotation: composite and vertex modules differ in size");
            std::vector<int> m(src.size());
            for (int g = 0; g < src.size(); ++g) {
                const auto& gen = src.gen(g);
                int bi = dst.bottom_index(src.bottoms()[gen.bottom]);
                int ti = dst.top_index(src.tops()[gen.top]);
                m[g] = (bi < 0 || ti < 0) ? -1 : dst.index(bi, ti, gen.dots);
                if (m[g] < 0) throw std::logic_error("rotation: unmatched generator " + src.name(g));
            }
            return m;
        };
        const auto match = matcher(T, V), match2 = matcher(T2, V2);
        const int NA = MA.size(), NB = MB.size();
        const auto& pres = from.cc.pres[mask];
        const auto& pres2 = to.cc.pres[mask2];
        const int hx = static_cast<int>(std::count(xib.begin(), xib.end(), 1)) - negB;
        const int hy = x0 - negA;
        const int deg = std::popcount(mask) - from.ck.n_minus;
        auto& blk = out.at(deg);

        with_field(r, [&](auto f) {
            using F = decltype(f);
            using E = typename F::E;
            Dense<F> mu(V.size(), NB * NA, f);
            for (int x = 0; x < NB; ++x)
                for (int y = 0; y < NA; ++y)
                    for (auto [t, c] : stacked_product(MB, x, MA, y, T, bmap, amap))
                        mu.at(match[t], x * NA + y) = f.add(mu.at(match[t], x * NA + y), f.from(r.from_int(BigInt(c))));
            Dense<F> track;
            auto piv = rref(f, mu, &track);
            std::map<int, std::vector<std::pair<int, E>>> swapped;  // y * NB + x -> image in V2
            auto image = [&](int y, int x) -> const std::vector<std::pair<int, E>>& {
                auto key = y * NB + x;
                auto it = swapped.find(key);
                if (it != swapped.end()) return it->second;
                std::vector<std::pair<int, E>> v;
                for (auto [t, c] : stacked_product(MA, y, MB, x, T2, amap2, bmap2)) v.push_back({match2[t], f.from(r.from_int(BigInt(c)))});
                return swapped[key] = std::move(v);
            };
            const E sign = f.from(r.from_int(BigInt((hx * hy) % 2 ? -1 : 1)));
            for (int s = 0; s < pres.dim(); ++s) {
                const int g = pres.basis[s];
                for (int rr = static_cast<int>(piv.size()); rr < track.rows; ++rr)
                    if (!f.is_zero(track.at(rr, g))) throw std::logic_error("rotation: gluing map is not onto");
                std::vector<E> img(V2.size(), f.zero());
                for (size_t rr = 0; rr < piv.size(); ++rr) {
                    E coef = track.at(static_cast<int>(rr), g);
                    if (f.is_zero(coef)) continue;
                    const int x = piv[rr] / NA, y = piv[rr] % NA;
                    // twist by the module degree of y plus the crossing's homological degree
                    coef = f.mul(coef, f.mul(sign, f.from(r.pow_q(-(MA.gen(y).degree + hy)))));
                    for (auto [t2, c] : image(y, x)) img[t2] = f.add(img[t2], f.mul(coef, c));
                }
                std::vector<Scalar> amb(V2.size());
                for (int t2 = 0; t2 < V2.size(); ++t2) amb[t2] = f.to(img[t2]);
                auto coords = pres2.project(std::move(amb));
                for (int s2 = 0; s2 < pres2.dim(); ++s2)
                    if (!r.is_zero(coords[s2])) blk.add(to.cc.offset[mask2] + s2, from.cc.offset[mask] + s, coords[s2], r);
            }
            return 0;
        });
    }
    return out;
}

DegMap compose_deg(const DegMap& second, const DegMap& first, const RingSpec& r) {
    DegMap out;
    for (const auto& [i, m] : first) {
        auto it = second.find(i);
        if (it == second.end()) {
            out[i] = SparseMatrix<Scalar>(0, m.cols());
            continue;
        }
        out[i] = mat_mul(it->second, m, r);
    }
    return out;
}

Slice inverse_letter(const Slice& s) { return {other(s.kind), s.pos, 0}; }

bool braid_like(const TangleWord& w) {
    return std::all_of(w.slices.begin(), w.slices.end(), [](const Slice& s) { return s.is_crossing(); });
}

std::vector<ActionStep> plan_movie(const TangleWord& base, const TangleWord& tp) {
    const int m = static_cast<int>(tp.slices.size());
    const int nb = static_cast<int>(base.slices.size());
    if (m && nb && base.bottom != 2)
        throw std::invalid_argument("tangle action: sliding through crossings of a cable with more than 2 strands needs R3 moves");
    std::vector<ActionStep> mv;
    // tp tp^-1 base
    for (int j = 0; j < m; ++j) mv.push_back({ActionStep::R2Insert, j, tp.slices[j].pos, tp.slices[j].kind == SliceKind::Pos});
    // slide tp^-1 (slices m..2m-1) through base, last letter first
    std::vector<Slice> word;
    for (int j = 0; j < m; ++j) word.push_back(tp.slices[j]);
    for (int j = m - 1; j >= 0; --j) word.push_back(inverse_letter(tp.slices[j]));
    word.insert(word.end(), base.slices.begin(), base.slices.end());
    for (int u = 2 * m - 1; u >= m; --u) {
        int at = u;
        for (int step = 0; step < nb; ++step, ++at) {
            const Slice x = word[at], y = word[at + 1];
            if (x == y) {
                std::swap(word[at], word[at + 1]);
                continue;
            }
            if (!(y == inverse_letter(x))) throw std::logic_error("tangle action: unexpected letters while sliding");
            mv.push_back({ActionStep::R2Remove, at, x.pos, x.kind == SliceKind::Pos});
            mv.push_back({ActionStep::R2Insert, at, y.pos, y.kind == SliceKind::Pos});
            std::swap(word[at], word[at + 1]);
        }
    }
    // tp base tp^-1 -> base tp^-1 tp
    for (int j = 0; j < m; ++j) mv.push_back({ActionStep::Rotate, 0, 0, true});
    for (int j = 0; j < m; ++j) {
        const int at = nb + m - 1 - j;
        const Slice& x = tp.slices[j];
        mv.push_back({ActionStep::R2Remove, at, x.pos, x.kind != SliceKind::Pos});
    }
    return mv;
}

TangleWord apply_step(const TangleWord& w, const ActionStep& s) {
    const SliceKind first = s.positive_first ? SliceKind::Pos : SliceKind::Neg;
    switch (s.kind) {
        case ActionStep::R2Insert: return with_inserted(w, s.slice, {{first, s.pos, 0}, {other(first), s.pos, 0}});
        case ActionStep::R2Remove:
            if (!slice_is(w, s.slice, first, s.pos) || !slice_is(w, s.slice + 1, other(first), s.pos))
                throw std::logic_error("tangle action: no R2 pair at slice " + std::to_string(s.slice));
            return with_erased(w, s.slice, 2);
        case ActionStep::Rotate: return rotate_closure(w, 1);
    }
    throw std::logic_error("unknown action step");
}

}  // namespace

std::string ActionStep::describe() const {
    std::ostringstream os;
    switch (kind) {
        case R2Insert: os << "R2+"; break;
        case R2Remove: os << "R2-"; break;
        case Rotate: return "rotate";
    }
    os << "@" << slice << ":" << (positive_first ? "p" : "n") << pos << (positive_first ? "n" : "p") << pos;
    return os.str();
}

int TangleAction::dim() const {
    int n = 0;
    for (const auto& [i, m] : matrix) n += m.rows();
    return n;
}

TangleAction braid_action(const TangleWord& base, const TangleWord& tp, const RingSpec& r) {
    if (r.characteristic() != 2)
        throw RingError("tangle action needs characteristic 2 (the construction is strictly functorial only there), got " + r.name());
    if (!braid_like(base) || !braid_like(tp)) throw std::invalid_argument("tangle action: words must be braid-like");
    if (tp.bottom != base.bottom) throw std::invalid_argument("tangle action: strand counts differ");
    TangleAction out;
    out.cable = base;
    out.ring = r;
    out.movie = plan_movie(base, tp);
    CkCache cache(r);
    auto cur = cache.get(base);
    DegMap total;
    for (const auto& [i, b] : cur->cc.complex.terms) total[i] = identity_matrix<Scalar>(static_cast<int>(b.size()), r.from_int(BigInt(1)), r);
    for (const auto& step : out.movie) {
        auto next = cache.get(apply_step(cur->w, step));
        DegMap f;
        switch (step.kind) {
            case ActionStep::R2Insert: {
                f = r2_map(*next, *cur, crossings_before(next->w, step.slice), true, r);
                break;
            }
            case ActionStep::R2Remove: {
                f = r2_map(*cur, *next, crossings_before(cur->w, step.slice), false, r);
                break;
            }
            case ActionStep::Rotate: f = rotation_map(*cur, *next, r); break;
        }
        check_chain_map(f, cur->cc.complex, next->cc.complex, step.describe());
        total = compose_deg(f, total, r);
        cur = next;
    }
    if (!(cur->w == base) && cur->w.to_string() != base.to_string())
        throw std::logic_error("tangle action: movie does not return to the cable");
    out.complex = cur->cc.complex;
    out.basis = homology_basis(out.complex);
    for (const auto& [i, b] : out.complex.terms) {
        const int h = out.basis.dim(i);
        if (!h) continue;
        SparseMatrix<Scalar> m(h, h);
        const auto& fi = total.at(i);
        for (int c = 0; c < h; ++c) {
            const auto& rep = out.basis.reps.at(i)[c];
            std::vector<Scalar> img(fi.rows(), Scalar(0));
            for (int rr = 0; rr < fi.rows(); ++rr)
                for (const auto& [k, v] : fi.row(rr)) img[rr] = r.add(img[rr], r.mul(v, rep[k]));
            auto coords = out.basis.coords(i, img);
            for (int rr = 0; rr < h; ++rr) m.set(rr, c, coords[rr], r);
        }
        out.matrix[i] = std::move(m);
    }
    return out;
}

TangleAction tangle_action(const TangleWord& t, const TangleWord& tp, const RingSpec& r) {
    if (r.characteristic() != 2)
        throw RingError("tangle action needs characteristic 2 (the construction is strictly functorial only there), got " + r.name());
    if (t.bottom != 1 || t.top() != 1) throw std::invalid_argument("tangle action: T must be a (1,1) tangle");
    if (!t.slices.empty())
        throw std::invalid_argument(
            "tangle action: sliding through the cable of a knotted (1,1) tangle needs R3 moves; use the full twist form");
    const int k = tp.bottom;
    const int o = t.bottom_orient.empty() ? 1 : t.bottom_orient[0];
    TangleWord base;
    base.bottom = k;
    base.bottom_orient.assign(k, o);
    TangleWord tpo = tp;
    tpo.bottom_orient = base.bottom_orient;
    return braid_action(base, tpo, r);
}

TangleAction full_twist_action(int full_twists, const TangleWord& tp, const RingSpec& r) {
    if (tp.bottom != 2) throw std::invalid_argument("full twist action: 2-strand words only");
    TangleWord base;
    base.bottom = 2;
    base.bottom_orient = {1, 1};
    for (int t = 0; t < std::abs(full_twists) * 2; ++t) base.slices.push_back({full_twists > 0 ? SliceKind::Pos : SliceKind::Neg, 1, 0});
    TangleWord tpo = tp;
    tpo.bottom_orient = base.bottom_orient;
    return braid_action(base, tpo, r);
}

namespace {

SparseMatrix<Scalar> invert(const SparseMatrix<Scalar>& m, const RingSpec& r) {
    const int n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("invert: not square");
    return with_field(r, [&](auto f) {
        using F = decltype(f);
        Dense<F> a(n, n, f);
        for (int i = 0; i < n; ++i)
            for (const auto& [c, v] : m.row(i)) a.at(i, c) = f.from(v);
        Dense<F> track;
        auto piv = rref(f, a, &track);
        if (static_cast<int>(piv.size()) != n) throw std::invalid_argument("invert: singular matrix");
        SparseMatrix<Scalar> out(n, n);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c)
                if (!f.is_zero(track.at(i, c))) out.set(i, c, f.to(track.at(i, c)), r);
        return out;
    });
}

}  // namespace

SparseMatrix<Scalar> action_in_tensor_basis(const TangleAction& a) {
    if (!a.cable.slices.empty()) throw std::invalid_argument("tensor basis: trivial tangle only");
    const auto& r = a.ring;
    const int k = a.cable.bottom;
    const auto& A = arc_algebra(k);
    CKBimodule h(FlatTangle::from_word(a.cable));
    auto pres = coinv_q(h, false, r);
    const int dim = pres.dim();
    // chain-level action (the differential vanishes)
    const auto& reps = a.basis.reps.at(0);
    const auto& coord = a.basis.coord_rows.at(0);
    SparseMatrix<Scalar> R(dim, dim), C(dim, dim);
    for (int c = 0; c < dim; ++c)
        for (int rr = 0; rr < dim; ++rr) {
            R.set(rr, c, reps[c][rr], r);
            C.set(c, rr, coord[c][rr], r);
        }
    auto S = mat_mul(mat_mul(R, a.matrix.at(0), r), C, r);
    // idempotent classes, columns ordered like canonical_basis_map
    auto diagrams = enumerate_cup_diagrams(k);
    SparseMatrix<Scalar> B(dim, static_cast<int>(diagrams.size()));
    for (size_t c = 0; c < diagrams.size(); ++c) {
        const auto& e = A.module().gen(A.idempotent(A.module().bottom_index(diagrams[c])));
        const auto& M = h.module();
        const int g = M.index(M.bottom_index(A.module().bottoms()[e.bottom]), M.top_index(A.module().tops()[e.top]), e.dots);
        std::vector<Scalar> v(pres.ambient, Scalar(0));
        v.at(g) = r.from_int(BigInt(1));
        auto coords = pres.project(std::move(v));
        for (int rr = 0; rr < dim; ++rr) B.set(rr, static_cast<int>(c), coords[rr], r);
    }
    auto Cm = specialize(canonical_basis_map(k), r);
    auto to_v = mat_mul(Cm, invert(B, r), r);
    return mat_mul(mat_mul(to_v, S, r), invert(to_v, r), r);
}

bool commutes_with_uq(const TangleAction& a, std::string* why) {
    auto S = action_in_tensor_basis(a);
    for (char g : {'E', 'F', 'K'}) {
        auto X = specialize(uqsl2_operator(g, a.cable.bottom), a.ring);
        if (!(mat_mul(X, S, a.ring) == mat_mul(S, X, a.ring))) {
            if (why) *why = std::string("action does not commute with ") + g;
            return false;
        }
    }
    return true;
}

bool skein_relation(const SparseMatrix<Scalar>& s_pos, const SparseMatrix<Scalar>& s_neg, const SparseMatrix<Scalar>& s_id,
                    const RingSpec& r) {
    auto lhs = mat_add(s_neg.scaled(r.pow_q(2), r), s_pos.scaled(r.pow_q(-2), r), r);
    auto rhs = s_id.scaled(r.add(r.pow_q(1), r.pow_q(-1)), r);
    return lhs == rhs;
}

namespace {

SkeinReport run_skein(const std::function<TangleAction(const TangleWord&)>& act, const RingSpec& r) {
    SkeinReport rep;
    if (r.characteristic() != 2) throw RingError("skein check needs characteristic 2, got " + r.name());
    if (r.is_zero(r.sub(r.pow_q(2), r.from_int(BigInt(1)))))
        throw RingError("skein check needs q of multiplicative order > 2");
    rep.pos = act(parse_word("p1", 2));
    rep.neg = act(parse_word("n1", 2));
    rep.holds = true;
    bool all_zero = true;
    std::vector<int> exps;
    for (int e = -6; e <= 6; ++e) exps.push_back(e);
    std::vector<char> uniform(exps.size(), 1);
    for (const auto& [i, sp] : rep.pos.matrix) {
        const auto& sn = rep.neg.matrix.at(i);
        auto id = identity_matrix<Scalar>(sp.rows(), r.from_int(BigInt(1)), r);
        if (!sp.is_zero() || !sn.is_zero()) all_zero = false;
        if (!skein_relation(sp, sn, id, r)) rep.holds = false;
        auto lhs = mat_add(sn.scaled(r.pow_q(2), r), sp.scaled(r.pow_q(-2), r), r);
        for (size_t t = 0; t < exps.size(); ++t) {
            auto rhs = id.scaled(r.mul(r.pow_q(exps[t]), r.add(r.pow_q(1), r.pow_q(-1))), r);
            if (!(lhs == rhs)) uniform[t] = 0;
        }
        if (i == 0 || rep.id.rows() == 0) rep.id = id;
    }
    rep.guard = all_zero;
    rep.discrepancy = INT_MIN;
    if (rep.holds) {
        rep.discrepancy = 0;
        rep.note = "relation holds";
    } else {
        for (size_t t = 0; t < exps.size(); ++t)
            if (uniform[t] && (rep.discrepancy == INT_MIN || std::abs(exps[t]) < std::abs(rep.discrepancy)))
                rep.discrepancy = exps[t];
        rep.note = rep.discrepancy == INT_MIN ? "relation fails, not by a uniform power of q"
                                              : "relation holds up to the factor q^" + std::to_string(rep.discrepancy);
    }
    return rep;
}

}  // namespace

SkeinReport skein_check(const TangleWord& t, const RingSpec& r) {
    return run_skein([&](const TangleWord& tp) { return tangle_action(t, tp, r); }, r);
}

SkeinReport skein_check_twisted(int full_twists, const RingSpec& r) {
    return run_skein([&](const TangleWord& tp) { return full_twist_action(full_twists, tp, r); }, r);
}

}  // namespace qakh
