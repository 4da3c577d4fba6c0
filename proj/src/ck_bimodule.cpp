/**
 * @file ck_bimodule.cpp
 * @brief Bimodule action tables, tensor products over H^j, saddle maps, cube complexes.
 */
#include "qakh/ck_bimodule.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qakh {

const ArcAlgebra& arc_algebra(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<ArcAlgebra>> cache;
    if (n < 0 || n > 6) throw std::invalid_argument("arc algebra: n out of range");
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<ArcAlgebra>(n);
    return *slot;
}

namespace {

std::vector<int> iota_map(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

void accumulate(std::map<int, long>& acc, const GenVector& v, long c) {
    for (auto [i, x] : v) {
        long& s = acc[i];
        s += c * x;
        if (s == 0) acc.erase(i);
    }
}

GenVector to_vector(const std::map<int, long>& acc) { return {acc.begin(), acc.end()}; }

}  // namespace

CKBimodule::CKBimodule(const FlatTangle& t) : mod_(t.contracted()) {
    const auto& top = top_algebra();
    const auto& bot = bottom_algebra();
    const int d = mod_.size();
    const auto ident = iota_map(mod_.tangle().nodes);
    left_.assign(top.dimension(), std::vector<GenVector>(d));
    right_.assign(d, std::vector<GenVector>(bot.dimension()));
    for (int x = 0; x < top.dimension(); ++x)
        for (int g = 0; g < d; ++g) left_[x][g] = stacked_product(top.module(), x, mod_, g, mod_, {}, ident);
    for (int g = 0; g < d; ++g)
        for (int y = 0; y < bot.dimension(); ++y) right_[g][y] = stacked_product(mod_, g, bot.module(), y, mod_, ident, {});
}

bool CKBimodule::verify_bimodule(std::string* why) const {
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    const auto& top = top_algebra();
    const auto& bot = bottom_algebra();
    const int d = size();
    // units
    auto one_t = top.unit(), one_b = bot.unit();
    for (int g = 0; g < d; ++g) {
        std::map<int, long> l, r;
        for (const auto& [i, c] : one_t) accumulate(l, left(i, g), c.coeff(0).get_si());
        for (const auto& [i, c] : one_b) accumulate(r, right(g, i), c.coeff(0).get_si());
        GenVector e{{g, 1}};
        if (to_vector(l) != e) return fail("left unit fails on " + mod_.name(g));
        if (to_vector(r) != e) return fail("right unit fails on " + mod_.name(g));
    }
    for (int g = 0; g < d; ++g) {
        for (int x = 0; x < top.dimension(); ++x)
            for (int x2 = 0; x2 < top.dimension(); ++x2) {
                std::map<int, long> a, b;
                for (auto [h, c] : left(x2, g)) accumulate(a, left(x, h), c);
                for (auto [z, c] : top.product(x, x2)) accumulate(b, left(z, g), c);
                if (a != b) return fail("left action not associative at " + mod_.name(g));
            }
        for (int y = 0; y < bot.dimension(); ++y)
            for (int y2 = 0; y2 < bot.dimension(); ++y2) {
                std::map<int, long> a, b;
                for (auto [h, c] : right(g, y)) accumulate(a, right(h, y2), c);
                for (auto [z, c] : bot.product(y, y2)) accumulate(b, right(g, z), c);
                if (a != b) return fail("right action not associative at " + mod_.name(g));
            }
        for (int x = 0; x < top.dimension(); ++x)
            for (int y = 0; y < bot.dimension(); ++y) {
                std::map<int, long> a, b;
                for (auto [h, c] : right(g, y)) accumulate(a, left(x, h), c);
                for (auto [h, c] : left(x, g)) accumulate(b, right(h, y), c);
                if (a != b) return fail("actions do not commute at " + mod_.name(g));
            }
    }
    return true;
}

SparseMatrix<LaurentPoly> BimoduleMap::matrix() const {
    SparseMatrix<LaurentPoly> out(rows, static_cast<int>(cols.size()));
    for (int c = 0; c < static_cast<int>(cols.size()); ++c)
        for (auto [r, v] : cols[c]) out.add(r, c, LaurentPoly(v), kPolyOps);
    return out;
}

BimoduleMap saddle_map(const TangleWord& w, const std::vector<int>& xi, int c, const CKBimodule& from,
                       const CKBimodule& to) {
    if (xi.at(c) != 0) throw std::invalid_argument("saddle_map: bit must be 0 at the source");
    auto xi1 = xi;
    xi1[c] = 1;
    auto rg0 = resolution_graph(w, xi, Closure::None);
    auto rg1 = resolution_graph(w, xi1, Closure::None);
    auto full0 = FlatTangle::from_resolution(rg0);
    auto full1 = FlatTangle::from_resolution(rg1);
    auto [bl, br, tl, tr] = site_nodes(w, rg0, c);
    // (p,q),(r,s) -> (p,r),(q,s)
    std::array<int, 4> pqrs = smoothing_is_vertical(w, c, 0) ? std::array<int, 4>{bl, tl, br, tr}
                                                             : std::array<int, 4>{bl, br, tl, tr};
    BimoduleMap f;
    f.rows = to.size();
    f.cols.resize(from.size());
    for (int g = 0; g < from.size(); ++g)
        f.cols[g] = closure_saddle(from.module(), full0, g, to.module(), full1, pqrs);
    return f;
}

bool is_bimodule_map(const BimoduleMap& f, const CKBimodule& from, const CKBimodule& to, std::string* why) {
    const auto& top = from.top_algebra();
    const auto& bot = from.bottom_algebra();
    for (int g = 0; g < from.size(); ++g) {
        for (int x = 0; x < top.dimension(); ++x) {
            std::map<int, long> a, b;
            for (auto [h, c] : from.left(x, g)) accumulate(a, f.cols[h], c);
            for (auto [h, c] : f.cols[g]) accumulate(b, to.left(x, h), c);
            if (a != b) {
                if (why) *why = "left action, generator " + from.module().name(g) + ", x = " + top.name(x);
                return false;
            }
        }
        for (int y = 0; y < bot.dimension(); ++y) {
            std::map<int, long> a, b;
            for (auto [h, c] : from.right(g, y)) accumulate(a, f.cols[h], c);
            for (auto [h, c] : f.cols[g]) accumulate(b, to.right(h, y), c);
            if (a != b) {
                if (why) *why = "right action, generator " + from.module().name(g) + ", y = " + bot.name(y);
                return false;
            }
        }
    }
    return true;
}

TensorCheck tensor_check(const CKBimodule& upper, const CKBimodule& lower, const RingSpec& r) {
    if (upper.m() != lower.n()) throw std::invalid_argument("tensor_check: widths do not match");
    const auto& mid = upper.bottom_algebra();
    const int M = upper.size(), N = lower.size();
    std::vector<int> amap, bmap;
    auto comp = upper.tangle().compose(lower.tangle(), &amap, &bmap);
    DiagramModule target(comp);
    TensorCheck out;
    out.ambient = M * N;
    out.composite_dim = target.size();

    std::vector<GenVector> mu(out.ambient);
    for (int g = 0; g < M; ++g)
        for (int h = 0; h < N; ++h)
            mu[g * N + h] = stacked_product(upper.module(), g, lower.module(), h, target, amap, bmap);

    return with_field(r, [&](auto f) {
        using F = decltype(f);
        auto el = [&](long v) { return f.from(r.from_int(BigInt(v))); };
        std::vector<std::vector<std::pair<int, long>>> rels;
        for (int g = 0; g < M; ++g)
            for (int a = 0; a < mid.dimension(); ++a)
                for (int h = 0; h < N; ++h) {
                    std::map<int, long> rel;
                    for (auto [g2, c] : upper.right(g, a)) accumulate(rel, {{g2 * N + h, 1}}, c);
                    for (auto [h2, c] : lower.left(a, h)) accumulate(rel, {{g * N + h2, 1}}, -c);
                    if (!rel.empty()) rels.push_back(to_vector(rel));
                }
        Dense<F> R(static_cast<int>(rels.size()), out.ambient, f);
        for (size_t i = 0; i < rels.size(); ++i)
            for (auto [c, v] : rels[i]) R.at(static_cast<int>(i), c) = el(v);
        out.tensor_dim = out.ambient - dense_rank(f, R);

        Dense<F> mu_m(out.composite_dim, out.ambient, f);
        for (int c = 0; c < out.ambient; ++c)
            for (auto [t, v] : mu[c]) mu_m.at(t, c) = el(v);
        out.mu_rank = dense_rank(f, mu_m);
        out.mu_balanced = true;
        for (const auto& rel : rels) {
            std::map<int, long> img;
            for (auto [c, v] : rel) accumulate(img, mu[c], v);
            for (auto [t, v] : img)
                if (!f.is_zero(el(v))) out.mu_balanced = false;
        }
        return out;
    });
}

int CKComplex::homological(unsigned mask) const { return std::popcount(mask) - n_minus; }

int CKComplex::quantum(unsigned mask, int g) const {
    return vertices[mask]->module().gen(g).degree + std::popcount(mask) + n_plus - 2 * n_minus;
}

int CKComplex::weight(unsigned mask, int g) const { return vertices[mask]->module().gen(g).weight; }

GradedChainComplex CKComplex::complex() const {
    GradedChainComplex cx;
    const unsigned nv = 1u << crossings;
    for (unsigned mask = 0; mask < nv; ++mask) {
        auto& term = cx.terms[homological(mask)];
        const auto& mod = vertices[mask]->module();
        for (int g = 0; g < mod.size(); ++g) {
            std::ostringstream name;
            for (int b = 0; b < crossings; ++b) name << (((mask >> b) & 1u) ? '1' : '0');
            name << ":" << mod.name(g);
            term.push_back({quantum(mask, g), weight(mask, g), name.str()});
        }
    }
    for (auto& [i, b] : cx.terms)
        if (cx.terms.count(i + 1)) cx.d[i] = SparseMatrix<LaurentPoly>(cx.dim(i + 1), cx.dim(i));
    for (const auto& e : edges) {
        const unsigned to = e.from | (1u << e.bit);
        auto& d = cx.d[homological(e.from)];
        for (int g = 0; g < static_cast<int>(e.map.cols.size()); ++g)
            for (auto [h, v] : e.map.cols[g]) d.add(offset[to] + h, offset[e.from] + g, LaurentPoly(e.sign * v), kPolyOps);
    }
    return cx;
}

CKComplex ck_complex(const TangleWord& w, Closure signs) {
    CKComplex cx;
    cx.word = w;
    cx.crossings = w.crossing_count();
    if (cx.crossings > 16) throw std::invalid_argument("ck_complex: too many crossings");
    if (cx.crossings > 0)
        for (int s : crossing_signs(w, signs)) (s > 0 ? cx.n_plus : cx.n_minus)++;
    const unsigned nv = 1u << cx.crossings;
    cx.resolutions.resize(nv);
    cx.vertices.resize(nv);
    cx.offset.assign(nv, 0);
    auto xi_of = [&](unsigned mask) {
        std::vector<int> xi(cx.crossings);
        for (int b = 0; b < cx.crossings; ++b) xi[b] = (mask >> b) & 1u;
        return xi;
    };
    parallel_for(static_cast<int>(nv), [&](int mask) {
        cx.resolutions[mask] = FlatTangle::from_word(w, xi_of(mask));
        cx.vertices[mask] = std::make_shared<const CKBimodule>(cx.resolutions[mask]);
    });
    std::map<int, int> fill;
    for (unsigned mask = 0; mask < nv; ++mask) {
        int i = std::popcount(mask);
        cx.offset[mask] = fill[i];
        fill[i] += cx.vertices[mask]->size();
    }
    std::vector<std::pair<unsigned, int>> todo;
    for (unsigned mask = 0; mask < nv; ++mask)
        for (int b = 0; b < cx.crossings; ++b)
            if (!(mask & (1u << b))) todo.push_back({mask, b});
    cx.edges.resize(todo.size());
    parallel_for(static_cast<int>(todo.size()), [&](int t) {
        auto [mask, b] = todo[t];
        auto& e = cx.edges[t];
        e.from = mask;
        e.bit = b;
        e.sign = edge_sign(mask, b);
        e.map = saddle_map(w, xi_of(mask), b, *cx.vertices[mask], *cx.vertices[mask | (1u << b)]);
    });
    return cx;
}

}  // namespace qakh
