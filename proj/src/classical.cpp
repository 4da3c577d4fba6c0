/**
 * @file classical.cpp
 * @brief q = 1 oracles built straight from closed resolutions.
 *
 * Deliberately shares nothing with the quantum pipeline beyond resolution
 * graphs: every circle of the closure gets its own tensor factor and saddles
 * use the classical tables.
 */
#include "qakh/classical.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qakh {

namespace {

std::vector<int> bits_of(unsigned mask, int m) {
    std::vector<int> xi(m);
    for (int c = 0; c < m; ++c) xi[c] = (mask >> c) & 1;
    return xi;
}

struct ClosedVertex {
    ResolutionGraph rg;
    std::vector<int> comp;
    std::vector<CurveType> type;
    bool zero = false;  // contains a nonseparating curve
};

ClosedVertex closed_vertex(const TangleWord& w, unsigned mask, Closure closure) {
    ClosedVertex v;
    auto xi = bits_of(mask, w.crossing_count());
    v.rg = resolution_graph(w, xi, closure);
    v.rg.g.components(v.comp);
    v.type = classify_curves(w, xi, closure);
    v.zero = std::count(v.type.begin(), v.type.end(), CurveType::Nonseparating) > 0;
    return v;
}

/// Labels: bit 0 = plus, 1 = minus; factor f is circle f (most significant first).
int encode(const std::vector<int>& labels) {
    int idx = 0;
    for (int l : labels) idx = idx * 2 + l;
    return idx;
}

/// Classical saddle between closed vertices; returns (target labels, coefficient) terms.
std::vector<std::pair<std::vector<int>, long>> classical_saddle(const ClosedVertex& s, const ClosedVertex& t,
                                                               const std::array<int, 4>& site,
                                                               const std::vector<int>& labels) {
    std::vector<int> sx, sy;
    for (int node : site) {
        if (std::find(sx.begin(), sx.end(), s.comp[node]) == sx.end()) sx.push_back(s.comp[node]);
        if (std::find(sy.begin(), sy.end(), t.comp[node]) == sy.end()) sy.push_back(t.comp[node]);
    }
    std::vector<int> base(t.type.size(), -1);
    for (int node = 0; node < static_cast<int>(s.comp.size()); ++node) {
        int c = s.comp[node];
        if (std::find(sx.begin(), sx.end(), c) == sx.end()) base[t.comp[node]] = labels[c];
    }
    std::vector<std::pair<std::vector<int>, long>> out;
    auto emit = [&](std::initializer_list<std::pair<int, int>> set, long coef) {
        auto l = base;
        for (auto [c, v] : set) l[c] = v;
        out.push_back({l, coef});
    };
    using T = CurveType;
    if (sx.size() == 2 && sy.size() == 1) {
        int a = sx[0], b = sx[1], c = sy[0];
        T ta = s.type[a], tb = s.type[b], tc = t.type[c];
        int la = labels[a], lb = labels[b];
        if (ta == T::Trivial && tb == T::Trivial) {
            if (!(la && lb)) emit({{c, la | lb}}, 1);
        } else if ((ta == T::Trivial) != (tb == T::Trivial) && tc == T::Essential) {
            int lw = ta == T::Trivial ? la : lb, lv = ta == T::Trivial ? lb : la;
            if (lw == 0) emit({{c, lv}}, 1);
        } else if (ta == T::Essential && tb == T::Essential && tc == T::Trivial) {
            if (la != lb) emit({{c, 1}}, 1);
        } else {
            throw std::logic_error("classical: unexpected merge");
        }
    } else if (sx.size() == 1 && sy.size() == 2) {
        int a = sx[0], c = sy[0], d = sy[1];
        T ta = s.type[a], tc = t.type[c], td = t.type[d];
        int la = labels[a];
        if (ta == T::Trivial && tc == T::Trivial && td == T::Trivial) {
            if (la == 0) {
                emit({{c, 0}, {d, 1}}, 1);
                emit({{c, 1}, {d, 0}}, 1);
            } else {
                emit({{c, 1}, {d, 1}}, 1);
            }
        } else if (ta == T::Essential && (tc == T::Trivial) != (td == T::Trivial)) {
            int cw = tc == T::Trivial ? c : d, cv = tc == T::Trivial ? d : c;
            emit({{cv, la}, {cw, 1}}, 1);
        } else if (ta == T::Trivial && tc == T::Essential && td == T::Essential) {
            if (la == 0) {
                emit({{c, 0}, {d, 1}}, 1);
                emit({{c, 1}, {d, 0}}, 1);
            }
        } else {
            throw std::logic_error("classical: unexpected split");
        }
    } else if (sx.size() == 1 && sy.size() == 1) {
        // Only on the Mobius band: a saddle from one curve to one curve.
        int a = sx[0], c = sy[0];
        T ta = s.type[a], tc = t.type[c];
        if (ta == T::Trivial && tc == T::Essential) {
            if (labels[a] == 0) {
                emit({{c, 0}}, 1);
                emit({{c, 1}}, 1);
            }
        } else if (ta == T::Essential && tc == T::Trivial) {
            emit({{c, 1}}, 1);
        }
        // every other one-to-one saddle is zero
    } else {
        throw std::logic_error("classical: saddle touches too many circles");
    }
    return out;
}

GradedChainComplex classical_complex(const TangleWord& w, Closure closure) {
    validate_closure(w, closure);
    const int m = w.crossing_count();
    int np = 0, nm = 0;
    for (int s : crossing_signs(w, closure)) (s > 0 ? np : nm)++;
    const unsigned nv = 1u << m;
    std::vector<ClosedVertex> verts(nv);
    std::vector<int> offset(nv, 0);
    GradedChainComplex cx;
    for (unsigned mask = 0; mask < nv; ++mask) {
        verts[mask] = closed_vertex(w, mask, closure);
        const auto& v = verts[mask];
        const int i = std::popcount(mask) - nm;
        auto& basis = cx.terms[i];
        offset[mask] = static_cast<int>(basis.size());
        if (v.zero) continue;
        const int f = static_cast<int>(v.type.size());
        for (int idx = 0; idx < (1 << f); ++idx) {
            int j = std::popcount(mask) + np - 2 * nm, k = 0;
            std::string name;
            for (int c = 0; c < f; ++c) {
                int minus = (idx >> (f - 1 - c)) & 1;
                if (v.type[c] == CurveType::Trivial) {
                    j += minus ? -1 : 1;
                    name += minus ? "w-" : "w+";
                } else {
                    if (closure == Closure::Annular) k += minus ? -1 : 1;
                    name += minus ? "v-" : "v+";
                }
            }
            basis.push_back({j, k, name});
        }
    }
    for (auto it = cx.terms.begin(); it != cx.terms.end();)
        it = it->second.empty() ? cx.terms.erase(it) : std::next(it);
    for (unsigned mask = 0; mask < nv; ++mask) {
        const auto& s = verts[mask];
        if (s.zero) continue;
        const int i = std::popcount(mask) - nm;
        for (int c = 0; c < m; ++c) {
            if ((mask >> c) & 1) continue;
            const unsigned to = mask | (1u << c);
            const auto& t = verts[to];
            if (t.zero) continue;
            auto site = site_nodes(w, s.rg, c);
            const int sign = edge_sign(mask, c);
            auto& d = cx.d[i];
            if (d.rows() == 0) d = SparseMatrix<LaurentPoly>(cx.dim(i + 1), cx.dim(i));
            const int f = static_cast<int>(s.type.size());
            for (int idx = 0; idx < (1 << f); ++idx) {
                std::vector<int> labels(f);
                for (int x = 0; x < f; ++x) labels[x] = (idx >> (f - 1 - x)) & 1;
                for (auto& [tl, coef] : classical_saddle(s, t, site, labels))
                    d.add(offset[to] + encode(tl), offset[mask] + idx, LaurentPoly(sign * coef), kPolyOps);
            }
        }
    }
    for (auto it = cx.d.begin(); it != cx.d.end();)
        it = it->second.is_zero() ? cx.d.erase(it) : std::next(it);
    return cx;
}

}  // namespace

std::vector<CurveType> classify_curves(const TangleWord& w, const std::vector<int>& xi, Closure closure) {
    auto rg = resolution_graph(w, xi, closure);
    std::vector<int> comp;
    const int nc = rg.g.components(comp);
    std::vector<CurveType> out(nc, CurveType::Trivial);
    if (closure == Closure::Annular) {
        std::vector<char> seen(nc, 0);
        for (int v = 0; v < rg.g.size(); ++v) {
            if (seen[comp[v]]) continue;
            seen[comp[v]] = 1;
            auto wk = rg.g.walk(v);
            int alg = 0;
            for (int s : wk.seam) alg += s;
            out[comp[v]] = alg ? CurveType::Essential : CurveType::Trivial;
        }
        return out;
    }
    if (closure != Closure::Mobius) throw std::invalid_argument("classify_curves: closed resolutions only");

    // Orientable double cover: two copies, each glued to the other by the reflection.
    auto open = resolution_graph(w, xi, Closure::None);
    const int N = open.g.size(), n = w.bottom, L = open.top_level();
    CurveGraph cover;
    for (int v = 0; v < 2 * N; ++v) cover.add_node();
    for (int copy = 0; copy < 2; ++copy)
        for (int e = 0; e < open.g.edge_count(); ++e)
            cover.add_edge(copy * N + open.g.edge(e).a, copy * N + open.g.edge(e).b);
    for (int p = 0; p < n; ++p) {
        cover.add_edge(open.node(L, p), N + open.node(0, n - 1 - p));
        cover.add_edge(N + open.node(L, p), open.node(0, n - 1 - p), p + 1);
    }
    std::vector<int> ccomp;
    cover.components(ccomp);
    std::vector<char> seen(nc, 0);
    for (int v = 0; v < N; ++v) {
        if (seen[comp[v]]) continue;
        seen[comp[v]] = 1;
        if (ccomp[v] == ccomp[N + v]) {
            out[comp[v]] = CurveType::Nonseparating;
            continue;
        }
        auto wk = cover.walk(v);
        int alg = 0;
        for (int s : wk.seam) alg += s;
        out[comp[v]] = alg ? CurveType::Essential : CurveType::Trivial;
    }
    return out;
}

GradedChainComplex classical_aps_complex(const TangleWord& w) { return classical_complex(w, Closure::Annular); }

GradedChainComplex classical_mobius_complex(const TangleWord& w) { return classical_complex(w, Closure::Mobius); }

}  // namespace qakh
