/**
 * @file arc_algebra.cpp
 * @brief Platform closures, surgery evaluation and the arc algebras.
 */
#include "qakh/arc_algebra.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace qakh {

// ---------------------------------------------------------------- cup diagrams

int CupDiagram::left_arcs() const { return static_cast<int>(std::count(match.begin(), match.end(), kLeft)); }
int CupDiagram::right_arcs() const { return static_cast<int>(std::count(match.begin(), match.end(), kRight)); }

std::string CupDiagram::code() const {
    std::string s;
    for (int i = 0; i < size(); ++i) {
        int p = match[i];
        if (p == kLeft) s += '0';
        else if (p == kRight) s += '1';
        else s += p > i ? '1' : '0';
    }
    return s;
}

std::string CupDiagram::notation() const {
    std::string s;
    for (int p : match) {
        if (p == kLeft) s += 'L';
        else if (p == kRight) s += 'R';
        else if (p < 10) s += static_cast<char>('0' + p);
        else s += "(" + std::to_string(p) + ")";
    }
    return s;
}

CupDiagram CupDiagram::from_code(const std::string& bits) {
    CupDiagram c;
    c.match.assign(bits.size(), kRight);
    std::vector<int> open;
    for (int i = 0; i < static_cast<int>(bits.size()); ++i) {
        if (bits[i] == '1') {
            open.push_back(i);
        } else if (bits[i] == '0') {
            if (open.empty()) {
                c.match[i] = kLeft;
            } else {
                c.match[i] = open.back();
                c.match[open.back()] = i;
                open.pop_back();
            }
        } else {
            throw std::invalid_argument("cup diagram code must be binary: " + bits);
        }
    }
    return c;
}

CupDiagram CupDiagram::parse(const std::string& s) {
    if (s.find_first_not_of("01") == std::string::npos) return from_code(s);
    CupDiagram c;
    for (char ch : s) {
        if (ch == 'L') c.match.push_back(kLeft);
        else if (ch == 'R') c.match.push_back(kRight);
        else if (ch >= '0' && ch <= '9') c.match.push_back(ch - '0');
        else throw std::invalid_argument("bad cup diagram notation: " + s);
    }
    // the partner notation must describe the same planar diagram as its own code
    const int n = c.size();
    for (int i = 0; i < n; ++i) {
        int p = c.match[i];
        if (p >= 0 && (p >= n || p == i || c.match[p] != i))
            throw std::invalid_argument("inconsistent pairing in " + s);
    }
    if (from_code(c.code()) != c) throw std::invalid_argument("non-planar cup diagram: " + s);
    return c;
}

CupDiagram CupDiagram::reflected() const {
    const int n = size();
    CupDiagram r;
    r.match.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        int p = match[i];
        r.match[n - 1 - i] = p == kLeft ? kRight : p == kRight ? kLeft : n - 1 - p;
    }
    return r;
}

std::vector<CupDiagram> enumerate_cup_diagrams(int n) {
    if (n < 0) throw std::invalid_argument("negative terminus count");
    std::vector<CupDiagram> out;
    for (long v = 0; v < (1L << n); ++v) {
        std::string bits;
        for (int i = 0; i < n; ++i) bits += ((v >> (n - 1 - i)) & 1) ? '1' : '0';
        out.push_back(CupDiagram::from_code(bits));
    }
    return out;
}

std::vector<CupDiagram> enumerate_cup_diagrams(int n, int weight) {
    std::vector<CupDiagram> out;
    for (auto& c : enumerate_cup_diagrams(n))
        if (c.weight() == weight) out.push_back(std::move(c));
    return out;
}

// ---------------------------------------------------------------- flat tangles

namespace {

std::vector<std::vector<int>> adjacency(const FlatTangle& t) {
    std::vector<std::vector<int>> adj(t.nodes);
    for (const auto& e : t.edges) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
    }
    return adj;
}

}  // namespace

FlatTangle FlatTangle::identity(int n) {
    FlatTangle t;
    t.m = t.n = n;
    t.nodes = 2 * n;
    for (int i = 0; i < n; ++i) {
        t.bottom.push_back(i);
        t.top.push_back(n + i);
        t.edges.push_back({i, n + i});
    }
    return t;
}

FlatTangle FlatTangle::from_matching(int m, int n, const std::vector<int>& match, int loops) {
    if (static_cast<int>(match.size()) != m + n) throw std::invalid_argument("matching size mismatch");
    FlatTangle t;
    t.m = m;
    t.n = n;
    t.nodes = m + n + 2 * loops;
    for (int i = 0; i < m; ++i) t.bottom.push_back(i);
    for (int j = 0; j < n; ++j) t.top.push_back(m + j);
    for (int e = 0; e < m + n; ++e) {
        int f = match[e];
        if (f < 0 || f >= m + n || match[f] != e || f == e) throw std::invalid_argument("bad endpoint matching");
        if (e < f) t.edges.push_back({e, f});
    }
    for (int l = 0; l < loops; ++l) {
        int a = m + n + 2 * l;
        t.edges.push_back({a, a + 1});
        t.edges.push_back({a, a + 1});
    }
    return t;
}

FlatTangle FlatTangle::from_resolution(const ResolutionGraph& rg) {
    FlatTangle t;
    t.m = rg.widths.front();
    t.n = rg.widths.back();
    t.nodes = rg.g.size();
    for (int e = 0; e < rg.g.edge_count(); ++e) {
        const auto& ed = rg.g.edge(e);
        if (ed.seam != 0) throw std::invalid_argument("flat tangle from a closed resolution");
        t.edges.push_back({ed.a, ed.b});
    }
    for (int p = 0; p < t.m; ++p) t.bottom.push_back(rg.node(0, p));
    for (int p = 0; p < t.n; ++p) t.top.push_back(rg.node(rg.top_level(), p));
    return t;
}

FlatTangle FlatTangle::from_word(const TangleWord& w, const std::vector<int>& xi) {
    std::vector<int> x = xi;
    if (x.empty()) x.assign(w.crossing_count(), 0);
    return from_resolution(resolution_graph(w, x, Closure::None));
}

std::vector<int> FlatTangle::matching() const {
    auto adj = adjacency(*this);
    std::vector<int> endpoint(nodes, -1);
    for (int i = 0; i < m; ++i) endpoint[bottom[i]] = i;
    for (int j = 0; j < n; ++j) endpoint[top[j]] = m + j;
    std::vector<int> out(m + n, -1);
    for (int e = 0; e < m + n; ++e) {
        if (out[e] >= 0) continue;
        int start = e < m ? bottom[e] : top[e - m];
        int prev = -1, cur = start;
        while (true) {
            int next = -1;
            for (int v : adj[cur])
                if (v != prev) { next = v; break; }
            if (next < 0) throw std::logic_error("flat tangle: open path ends inside");
            prev = cur;
            cur = next;
            if (endpoint[cur] >= 0) break;
        }
        out[e] = endpoint[cur];
        out[endpoint[cur]] = e;
    }
    return out;
}

int FlatTangle::loop_count() const {
    std::vector<int> parent(nodes);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (const auto& e : edges) parent[find(e[0])] = find(e[1]);
    std::vector<char> has_boundary(nodes, 0), seen(nodes, 0);
    for (int v : bottom) has_boundary[find(v)] = 1;
    for (int v : top) has_boundary[find(v)] = 1;
    int loops = 0;
    for (int v = 0; v < nodes; ++v) {
        int r = find(v);
        if (!seen[r] && !has_boundary[r]) ++loops;
        seen[r] = 1;
    }
    return loops;
}

int FlatTangle::bottom_turnbacks() const {
    auto mt = matching();
    int c = 0;
    for (int i = 0; i < m; ++i)
        if (mt[i] < m && mt[i] > i) ++c;
    return c;
}

FlatTangle FlatTangle::contracted() const { return from_matching(m, n, matching(), loop_count()); }

FlatTangle FlatTangle::compose(const FlatTangle& below, std::vector<int>* above_map, std::vector<int>* below_map) const {
    if (m != below.n) throw std::invalid_argument("compose: width mismatch");
    FlatTangle t;
    t.m = below.m;
    t.n = n;
    t.nodes = below.nodes;
    std::vector<int> bm(below.nodes), am(nodes, -1);
    std::iota(bm.begin(), bm.end(), 0);
    for (int i = 0; i < m; ++i) am[bottom[i]] = below.top[i];
    for (int v = 0; v < nodes; ++v)
        if (am[v] < 0) am[v] = t.nodes++;
    t.edges = below.edges;
    for (const auto& e : edges) t.edges.push_back({am[e[0]], am[e[1]]});
    t.bottom = below.bottom;
    for (int v : top) t.top.push_back(am[v]);
    if (above_map) *above_map = am;
    if (below_map) *below_map = bm;
    return t;
}

std::string FlatTangle::describe() const {
    auto mt = matching();
    std::string s = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
    for (int e = 0; e < m + n; ++e) {
        if (mt[e] < e) continue;
        auto nm = [&](int x) { return x < m ? "b" + std::to_string(x) : "t" + std::to_string(x - m); };
        s += " " + nm(e) + "-" + nm(mt[e]);
    }
    int l = loop_count();
    if (l) s += " loops:" + std::to_string(l);
    return s;
}

// ---------------------------------------------------------------- closures

std::vector<int> extended_matching(const CupDiagram& c, int K) {
    const int w = c.size(), lam = c.weight();
    const int l = c.left_arcs(), r = c.right_arcs();
    if (K < l || K + lam < r) throw std::invalid_argument("extended_matching: too few pads");
    const int E = 2 * K + w + lam;
    std::vector<int> p(E, -1);
    std::vector<int> lefts, rights;
    for (int i = 0; i < w; ++i) {
        if (c.match[i] >= 0) p[K + i] = K + c.match[i];
        else if (c.match[i] == CupDiagram::kLeft) lefts.push_back(i);
        else rights.push_back(i);
    }
    std::reverse(rights.begin(), rights.end());
    auto join = [&](int a, int b) { p[a] = b; p[b] = a; };
    for (int j = 0; j < l; ++j) join(K + lefts[j], K - 1 - j);
    for (int j = 0; j < r; ++j) join(K + rights[j], K + w + j);
    for (int t = 0; t < K - l; ++t) join(K - 1 - (l + t), K + w + r + t);
    return p;
}

PlatformClosure build_closure(const FlatTangle& t, const CupDiagram& bottom, const CupDiagram& top, int K) {
    if (bottom.size() != t.m || top.size() != t.n) throw std::invalid_argument("closure: diagram sizes");
    if (bottom.weight() != top.weight()) throw std::invalid_argument("closure: weights differ");
    PlatformClosure c;
    c.K = K;
    c.m = t.m;
    c.n = t.n;
    c.weight = bottom.weight();
    c.eb = 2 * K + t.m + c.weight;
    c.et = 2 * K + t.n + c.weight;
    c.tangle_node.assign(t.nodes, -1);
    for (int i = 0; i < t.m; ++i) c.tangle_node[t.bottom[i]] = K + i;
    for (int j = 0; j < t.n; ++j) c.tangle_node[t.top[j]] = c.eb + K + j;
    int next = c.eb + c.et;
    for (int v = 0; v < t.nodes; ++v)
        if (c.tangle_node[v] < 0) c.tangle_node[v] = next++;
    const int N = next;
    c.nbr.assign(N, {-1, -1});
    auto link = [&](int a, int b) {
        for (int v : {a, b}) {
            auto& s = c.nbr[v];
            int w = v == a ? b : a;
            if (s[0] < 0) s[0] = w;
            else if (s[1] < 0) s[1] = w;
            else throw std::logic_error("closure node of degree > 2");
        }
    };
    auto eb_m = extended_matching(bottom, K), et_m = extended_matching(top, K);
    for (int u = 0; u < c.eb; ++u)
        if (u < eb_m[u]) link(u, eb_m[u]);
    for (int u = 0; u < c.et; ++u)
        if (u < et_m[u]) link(c.eb + u, c.eb + et_m[u]);
    const int right = K + c.weight;
    for (int p = 0; p < K; ++p) link(p, c.eb + p);
    for (int s = 0; s < right; ++s) link(K + t.m + s, c.eb + K + t.n + s);
    for (const auto& e : t.edges) link(c.tangle_node[e[0]], c.tangle_node[e[1]]);
    for (int v = 0; v < N; ++v)
        if (c.nbr[v][1] < 0) throw std::logic_error("closure node of degree < 2");

    c.comp.assign(N, -1);
    auto key_of = [&](int v) -> long {
        if (v < c.eb) return v >= K && v < K + t.m ? v - K : LONG_MAX;
        if (v < c.eb + c.et) {
            int pos = v - c.eb;
            return pos >= K && pos < K + t.n ? t.m + (pos - K) : LONG_MAX;
        }
        return static_cast<long>(t.m + t.n) + (v - c.eb - c.et);
    };
    for (int v = 0; v < N; ++v) {
        if (c.comp[v] >= 0) continue;
        int id = static_cast<int>(c.comps.size());
        PlatformClosure::Component pc;
        pc.key = LONG_MAX;
        int prev = -1, cur = v;
        do {
            c.comp[cur] = id;
            long k = key_of(cur);
            pc.key = std::min(pc.key, k);
            if (cur < c.eb + c.et && k != LONG_MAX) pc.has_real = true;
            int nx = c.nbr[cur][0] != prev ? c.nbr[cur][0] : c.nbr[cur][1];
            prev = cur;
            cur = nx;
        } while (cur != v);
        c.comps.push_back(pc);
    }
    for (int p = 0; p < K; ++p) c.comps[c.comp[p]].left_pads++;
    for (int s = 0; s < right; ++s) c.comps[c.comp[K + t.m + s]].right_pads++;
    c.free_rank.assign(c.comps.size(), -1);
    for (int i = 0; i < static_cast<int>(c.comps.size()); ++i) {
        const auto& pc = c.comps[i];
        if (pc.left_pads > 1 || pc.right_pads > 1) c.admissible = false;
        if (pc.left_pads == 0 && pc.right_pads == 0) c.free_order.push_back(i);
    }
    std::sort(c.free_order.begin(), c.free_order.end(),
              [&](int a, int b) { return c.comps[a].key < c.comps[b].key; });
    for (int r = 0; r < c.free_count(); ++r) c.free_rank[c.free_order[r]] = r;
    return c;
}

// ---------------------------------------------------------------- degree

int closure_degree(const FlatTangle& t, const CupDiagram& a, const CupDiagram& b) {
    // Concrete planar picture: pieces are polylines between labeled nodes. Every
    // closed curve is traversed once; the sign of its area fixes the
    // counterclockwise direction, which decides whether each cup / cap turns
    // clockwise. Unmatched platform arcs are joined around the far side.
    using Pt = std::pair<double, double>;
    const int m = t.m, n = t.n;
    const auto mt = t.matching();
    const int la = a.left_arcs(), lb = b.left_arcs(), ra = a.right_arcs(), rb = b.right_arcs();
    const int PL = std::max(la, lb), PR = std::max(ra, rb);
    const double W = std::max({m, n, 1});
    const double span = W + PL + PR + 2;
    const double H = 10.0 * span * span, big = 2.0 * span;
    auto xb = [&](int i) { return i + (W - m) / 2.0; };
    auto xt = [&](int j) { return j + (W - n) / 2.0; };
    auto xl = [&](int k) { return -static_cast<double>(k); };
    auto xr = [&](int k) { return W - 1 + k; };
    const int base = m + n;
    auto LB = [&](int k) { return base + k - 1; };
    auto LT = [&](int k) { return base + PL + k - 1; };
    auto RB = [&](int k) { return base + 2 * PL + k - 1; };
    auto RT = [&](int k) { return base + 2 * PL + PR + k - 1; };
    const int N = base + 2 * PL + 2 * PR;

    enum Kind { Other, Cup, Cap };
    struct Piece {
        int u, v;
        std::vector<Pt> pts;
        Kind kind;
    };
    std::vector<Piece> pieces;
    auto add = [&](int u, int v, std::vector<Pt> pts, Kind k) { pieces.push_back({u, v, std::move(pts), k}); };

    // bottom diagram, below the line y = 0
    {
        std::vector<int> lefts, rights;
        for (int i = 0; i < m; ++i) {
            int p = a.match[i];
            if (p > i) {
                double s = xb(p) - xb(i);
                add(i, p, {{xb(i), 0}, {xb(i), -s}, {xb(p), -s}, {xb(p), 0}}, Cup);
            } else if (p == CupDiagram::kLeft) {
                lefts.push_back(i);
            } else if (p == CupDiagram::kRight) {
                rights.push_back(i);
            }
        }
        std::reverse(rights.begin(), rights.end());
        for (int k = 1; k <= la; ++k) {
            int i = lefts[k - 1];
            double s = xb(i) - xl(k);
            add(i, LB(k), {{xb(i), 0}, {xb(i), -s}, {xl(k), -s}, {xl(k), 0}}, Other);
        }
        for (int k = 1; k <= ra; ++k) {
            int i = rights[k - 1];
            double s = xr(k) - xb(i);
            add(i, RB(k), {{xb(i), 0}, {xb(i), -s}, {xr(k), -s}, {xr(k), 0}}, Other);
        }
    }
    // top diagram, above y = H
    {
        std::vector<int> lefts, rights;
        for (int j = 0; j < n; ++j) {
            int p = b.match[j];
            if (p > j) {
                double s = xt(p) - xt(j);
                add(m + j, m + p, {{xt(j), H}, {xt(j), H + s}, {xt(p), H + s}, {xt(p), H}}, Cap);
            } else if (p == CupDiagram::kLeft) {
                lefts.push_back(j);
            } else if (p == CupDiagram::kRight) {
                rights.push_back(j);
            }
        }
        std::reverse(rights.begin(), rights.end());
        for (int k = 1; k <= lb; ++k) {
            int j = lefts[k - 1];
            double s = xt(j) - xl(k);
            add(m + j, LT(k), {{xt(j), H}, {xt(j), H + s}, {xl(k), H + s}, {xl(k), H}}, Other);
        }
        for (int k = 1; k <= rb; ++k) {
            int j = rights[k - 1];
            double s = xr(k) - xt(j);
            add(m + j, RT(k), {{xt(j), H}, {xt(j), H + s}, {xr(k), H + s}, {xr(k), H}}, Other);
        }
    }
    // the tangle itself
    for (int e = 0; e < m + n; ++e) {
        int f = mt[e];
        if (f < e) continue;
        if (f < m) {
            double s = xb(f) - xb(e);
            add(e, f, {{xb(e), 0}, {xb(e), s}, {xb(f), s}, {xb(f), 0}}, Cap);
        } else if (e >= m) {
            double s = xt(f - m) - xt(e - m);
            add(e, f, {{xt(e - m), H}, {xt(e - m), H - s}, {xt(f - m), H - s}, {xt(f - m), H}}, Cup);
        } else {
            add(e, f, {{xb(e), 0}, {xt(f - m), H}}, Other);
        }
    }
    // platform strands
    for (int k = 1; k <= std::min(la, lb); ++k) add(LB(k), LT(k), {{xl(k), 0}, {xl(k), H}}, Other);
    for (int k = 1; k <= std::min(ra, rb); ++k) add(RB(k), RT(k), {{xr(k), 0}, {xr(k), H}}, Other);
    for (int s = 1; s <= la - lb; ++s) {
        int k = lb + s, k2 = rb + s;
        double y = H + big + s;
        add(LB(k), RB(k2), {{xl(k), 0}, {xl(k), y}, {xr(k2), y}, {xr(k2), 0}}, Other);
    }
    for (int s = 1; s <= lb - la; ++s) {
        int k = la + s, k2 = ra + s;
        double y = -big - s;
        add(LT(k), RT(k2), {{xl(k), H}, {xl(k), y}, {xr(k2), y}, {xr(k2), H}}, Other);
    }

    std::vector<std::vector<int>> at(N);
    for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
        at[pieces[p].u].push_back(p);
        at[pieces[p].v].push_back(p);
    }
    std::vector<char> used(pieces.size(), 0);
    int clockwise = 0;
    for (int p0 = 0; p0 < static_cast<int>(pieces.size()); ++p0) {
        if (used[p0]) continue;
        std::vector<std::pair<int, bool>> walk;  // piece, traversed u -> v
        std::vector<Pt> poly;
        int node = pieces[p0].u, p = p0;
        while (!used[p]) {
            used[p] = 1;
            bool fwd = pieces[p].u == node;
            walk.push_back({p, fwd});
            auto pts = pieces[p].pts;
            if (!fwd) std::reverse(pts.begin(), pts.end());
            poly.insert(poly.end(), pts.begin(), pts.end());
            node = fwd ? pieces[p].v : pieces[p].u;
            if (at[node].size() != 2) throw std::logic_error("closure_degree: open curve");
            p = at[node][0] == p ? at[node][1] : at[node][0];
        }
        double area = 0;
        for (size_t i = 0; i < poly.size(); ++i) {
            const auto& [x1, y1] = poly[i];
            const auto& [x2, y2] = poly[(i + 1) % poly.size()];
            area += x1 * y2 - x2 * y1;
        }
        if (area == 0) throw std::logic_error("closure_degree: degenerate curve");
        for (auto [q, fwd] : walk) {
            if (pieces[q].kind == Other) continue;
            bool left_to_right = fwd == (area > 0);  // direction under the counterclockwise orientation
            if (pieces[q].kind == Cup ? !left_to_right : left_to_right) ++clockwise;
        }
    }
    return t.loop_count() + t.bottom_turnbacks() - clockwise;
}

// ---------------------------------------------------------------- modules

DiagramModule::DiagramModule(FlatTangle t) : t_(std::move(t)) {
    bottoms_ = enumerate_cup_diagrams(t_.m);
    tops_ = enumerate_cup_diagrams(t_.n);
    const int K = std::max(t_.m, t_.n);
    for (int a = 0; a < static_cast<int>(bottoms_.size()); ++a)
        for (int b = 0; b < static_cast<int>(tops_.size()); ++b) {
            if (bottoms_[a].weight() != tops_[b].weight()) continue;
            auto cl = build_closure(t_, bottoms_[a], tops_[b], K);
            if (!cl.admissible) continue;
            int deg0 = closure_degree(t_, bottoms_[a], tops_[b]);
            for (std::uint32_t mask = 0; mask < (1u << cl.free_count()); ++mask) {
                Gen g{a, b, mask, bottoms_[a].weight(), deg0 - 2 * std::popcount(mask)};
                lookup_[{a, b, static_cast<long>(mask)}] = static_cast<int>(gens_.size());
                gens_.push_back(g);
            }
        }
}

int DiagramModule::index(int bottom, int top, std::uint32_t dots) const {
    auto it = lookup_.find({bottom, top, static_cast<long>(dots)});
    return it == lookup_.end() ? -1 : it->second;
}

int DiagramModule::bottom_index(const CupDiagram& c) const {
    auto it = std::find(bottoms_.begin(), bottoms_.end(), c);
    return it == bottoms_.end() ? -1 : static_cast<int>(it - bottoms_.begin());
}

int DiagramModule::top_index(const CupDiagram& c) const {
    auto it = std::find(tops_.begin(), tops_.end(), c);
    return it == tops_.end() ? -1 : static_cast<int>(it - tops_.begin());
}

std::string DiagramModule::name(int i) const {
    const auto& g = gens_[i];
    std::string s = "(" + bottoms_[g.bottom].code() + "|" + tops_[g.top].code() + ")";
    if (g.dots) {
        auto cl = build_closure(t_, bottoms_[g.bottom], tops_[g.top], std::max(t_.m, t_.n));
        for (int r = 0; r < cl.free_count(); ++r)
            if ((g.dots >> r) & 1) s += "*" + std::to_string(cl.comps[cl.free_order[r]].key);
    }
    return s;
}

int DiagramModule::dimension(int weight) const {
    int d = 0;
    for (const auto& g : gens_) d += g.weight == weight;
    return d;
}

// ---------------------------------------------------------------- surgery evaluation

namespace {

/// Khovanov merge / split on labeled 2-regular graphs. Label 1 = dotted.
class SurgeryEngine {
public:
    struct Term {
        long coeff;
        std::vector<std::uint8_t> label;
    };
    std::vector<std::array<int, 2>> nbr;
    std::vector<Term> terms;

    std::vector<int> cycle(int v) const {
        std::vector<int> out{v};
        int prev = v, cur = nbr[v][0];
        while (cur != v) {
            out.push_back(cur);
            int nx = nbr[cur][0] != prev ? nbr[cur][0] : nbr[cur][1];
            prev = cur;
            cur = nx;
        }
        return out;
    }

    void replace(int v, int old_nb, int new_nb) {
        auto& s = nbr[v];
        if (s[0] == old_nb) s[0] = new_nb;
        else if (s[1] == old_nb) s[1] = new_nb;
        else throw std::logic_error("surgery: missing edge");
    }

    /// Edges (p,q), (r,s) become (p,r), (q,s).
    void saddle(int p, int q, int r, int s) {
        auto before = cycle(p);
        bool one = std::find(before.begin(), before.end(), r) != before.end();
        replace(p, q, r);
        replace(q, p, s);
        replace(r, s, p);
        replace(s, r, q);
        auto A = cycle(p);
        bool still_one = std::find(A.begin(), A.end(), q) != A.end();
        std::vector<Term> out;
        if (!one) {
            if (!still_one) throw std::logic_error("surgery: merge produced two circles");
            for (auto& t : terms) {
                int l = t.label[p] + t.label[r];
                if (l > 1) continue;
                for (int v : A) t.label[v] = static_cast<std::uint8_t>(l);
                out.push_back(std::move(t));
            }
        } else {
            if (still_one) throw std::logic_error("surgery: non-orientable saddle");
            auto B = cycle(q);
            for (auto& t : terms) {
                if (t.label[p]) {
                    for (int v : A) t.label[v] = 1;
                    for (int v : B) t.label[v] = 1;
                    out.push_back(std::move(t));
                } else {
                    Term t2 = t;
                    for (int v : A) t.label[v] = 1;
                    for (int v : B) t2.label[v] = 1;
                    out.push_back(std::move(t));
                    out.push_back(std::move(t2));
                }
            }
        }
        terms = std::move(out);
    }
};

void seed_labels(const PlatformClosure& c, std::uint32_t dots, std::vector<std::uint8_t>& label, int offset) {
    for (int v = 0; v < static_cast<int>(c.comp.size()); ++v) {
        int r = c.free_rank[c.comp[v]];
        label[offset + v] = r >= 0 ? static_cast<std::uint8_t>((dots >> r) & 1) : 0;
    }
}

/// Reads off the final terms in the target closure; target_of maps engine nodes to target nodes.
GenVector collect(const SurgeryEngine& eng, const PlatformClosure& ct, const std::vector<int>& target_of,
                  const DiagramModule& target, int bottom_idx, int top_idx) {
    const int N = static_cast<int>(eng.nbr.size());
    std::vector<int> comp(N, -1), comp_target;
    std::vector<int> rep;
    for (int v = 0; v < N; ++v) {
        if (comp[v] >= 0) continue;
        int id = static_cast<int>(rep.size());
        int tc = -1;
        for (int u : eng.cycle(v)) {
            comp[u] = id;
            if (target_of[u] < 0) continue;
            int c = ct.comp[target_of[u]];
            if (tc >= 0 && tc != c) throw std::logic_error("surgery result does not match the target closure");
            tc = c;
        }
        if (tc < 0) throw std::logic_error("surgery result has an unmapped circle");
        rep.push_back(v);
        comp_target.push_back(tc);
    }
    {
        std::vector<int> hits(ct.comps.size(), 0);
        for (int c : comp_target) hits[c]++;
        for (int h : hits)
            if (h != 1) throw std::logic_error("surgery result and target closure differ in circles");
    }
    std::map<int, long> acc;
    for (const auto& t : eng.terms) {
        std::uint32_t mask = 0;
        bool dead = false;
        for (size_t i = 0; i < rep.size() && !dead; ++i) {
            if (!t.label[rep[i]]) continue;
            int r = ct.free_rank[comp_target[i]];
            if (r < 0) dead = true;
            else mask |= 1u << r;
        }
        if (dead) continue;
        int idx = target.index(bottom_idx, top_idx, mask);
        if (idx < 0) throw std::logic_error("surgery produced an unknown generator");
        acc[idx] += t.coeff;
    }
    GenVector out;
    for (auto [i, c] : acc)
        if (c != 0) out.push_back({i, c});
    return out;
}

}  // namespace

GenVector stacked_product(const DiagramModule& upper, int x, const DiagramModule& lower, int y,
                          const DiagramModule& target, const std::vector<int>& upper_map,
                          const std::vector<int>& lower_map) {
    const auto& gx = upper.gen(x);
    const auto& gy = lower.gen(y);
    const CupDiagram& c = upper.bottoms()[gx.bottom];
    if (c != lower.tops()[gy.top]) return {};
    const CupDiagram& d = upper.tops()[gx.top];
    const CupDiagram& a = lower.bottoms()[gy.bottom];
    const int ai = target.bottom_index(a), di = target.top_index(d);
    if (ai < 0 || di < 0) throw std::invalid_argument("stacked_product: target widths do not match");
    const auto& tu = upper.tangle();
    const auto& tl = lower.tangle();
    const auto& tt = target.tangle();
    const int K = std::max({tu.m, tu.n, tl.m, tl.n, tt.m, tt.n});
    auto CT = build_closure(tt, a, d, K);
    if (!CT.admissible) return {};
    auto CX = build_closure(tu, c, d, K);
    auto CY = build_closure(tl, a, c, K);
    const int NX = static_cast<int>(CX.nbr.size()), NY = static_cast<int>(CY.nbr.size());

    SurgeryEngine eng;
    eng.nbr = CX.nbr;
    for (auto s : CY.nbr) eng.nbr.push_back({s[0] + NX, s[1] + NX});
    SurgeryEngine::Term t0{1, std::vector<std::uint8_t>(NX + NY, 0)};
    seed_labels(CX, gx.dots, t0.label, 0);
    seed_labels(CY, gy.dots, t0.label, NX);
    eng.terms.push_back(std::move(t0));

    auto ext = extended_matching(c, K);
    for (int u = 0; u < static_cast<int>(ext.size()); ++u) {
        int v = ext[u];
        if (u > v) continue;
        eng.saddle(CX.bottom_node(u), CX.bottom_node(v), NX + CY.top_node(u), NX + CY.top_node(v));
        if (eng.terms.empty()) return {};
    }

    std::vector<int> target_of(NX + NY, -1);
    for (int e = 0; e < CX.et; ++e) target_of[CX.top_node(e)] = CT.top_node(e);
    for (int e = 0; e < CY.eb; ++e) target_of[NX + CY.bottom_node(e)] = CT.bottom_node(e);
    for (int u = 0; u < tu.nodes; ++u)
        if (u < static_cast<int>(upper_map.size()) && upper_map[u] >= 0 && target_of[CX.tangle_node[u]] < 0)
            target_of[CX.tangle_node[u]] = CT.tangle_node[upper_map[u]];
    for (int u = 0; u < tl.nodes; ++u)
        if (u < static_cast<int>(lower_map.size()) && lower_map[u] >= 0 && target_of[NX + CY.tangle_node[u]] < 0)
            target_of[NX + CY.tangle_node[u]] = CT.tangle_node[lower_map[u]];
    return collect(eng, CT, target_of, target, ai, di);
}

GenVector closure_saddle(const DiagramModule& from, const FlatTangle& full_from, int x, const DiagramModule& to,
                         const FlatTangle& full_to, std::array<int, 4> pqrs) {
    const auto& g = from.gen(x);
    const CupDiagram& a = from.bottoms()[g.bottom];
    const CupDiagram& b = from.tops()[g.top];
    const int K = std::max(full_from.m, full_from.n);
    auto C0 = build_closure(full_from, a, b, K);
    auto C1 = build_closure(full_to, a, b, K);
    if (!C1.admissible) return {};
    SurgeryEngine eng;
    eng.nbr = C0.nbr;
    SurgeryEngine::Term t0{1, std::vector<std::uint8_t>(C0.nbr.size(), 0)};
    seed_labels(C0, g.dots, t0.label, 0);
    eng.terms.push_back(std::move(t0));
    const auto& tn = C0.tangle_node;
    eng.saddle(tn[pqrs[0]], tn[pqrs[1]], tn[pqrs[2]], tn[pqrs[3]]);
    if (eng.terms.empty()) return {};
    if (C1.nbr.size() != C0.nbr.size()) throw std::logic_error("closure_saddle: node sets differ");
    std::vector<int> target_of(C0.nbr.size());
    std::iota(target_of.begin(), target_of.end(), 0);
    return collect(eng, C1, target_of, to, to.bottom_index(a), to.top_index(b));
}

// ---------------------------------------------------------------- arc algebra

ArcAlgebra::ArcAlgebra(int n) : n_(n), mod_(FlatTangle::identity(n)) {
    const int d = mod_.size();
    table_.assign(d, std::vector<GenVector>(d));
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) table_[x][y] = stacked_product(mod_, x, mod_, y, mod_, {}, {});
}

int ArcAlgebra::find(const std::string& bottom, const std::string& top, std::uint32_t dots) const {
    int a = mod_.bottom_index(CupDiagram::parse(bottom)), b = mod_.top_index(CupDiagram::parse(top));
    if (a < 0 || b < 0) return -1;
    return mod_.index(a, b, dots);
}

ArcElement ArcAlgebra::multiply(const ArcElement& x, const ArcElement& y) const {
    ArcElement out;
    for (const auto& [i, ci] : x)
        for (const auto& [j, cj] : y)
            for (auto [k, c] : table_[i][j]) {
                auto& slot = out[k];
                slot += ci * cj * LaurentPoly(c);
                if (slot.is_zero()) out.erase(k);
            }
    return out;
}

int ArcAlgebra::idempotent(int c) const {
    int t = mod_.top_index(mod_.bottoms()[c]);
    return mod_.index(c, t, 0);
}

ArcElement ArcAlgebra::unit() const {
    ArcElement u;
    for (int c = 0; c < static_cast<int>(mod_.bottoms().size()); ++c) u[idempotent(c)] = LaurentPoly(1);
    return u;
}

int ArcAlgebra::rho(int i) const {
    const auto& g = mod_.gen(i);
    const CupDiagram& a = mod_.bottoms()[g.bottom];
    const CupDiagram& b = mod_.tops()[g.top];
    CupDiagram ra = a.reflected(), rb = b.reflected();
    const int K = n_;
    auto C = build_closure(mod_.tangle(), a, b, K);
    auto R = build_closure(mod_.tangle(), ra, rb, K);
    std::uint32_t mask = 0;
    for (int r = 0; r < C.free_count(); ++r) {
        if (!((g.dots >> r) & 1)) continue;
        long key = C.comps[C.free_order[r]].key;  // a real endpoint of this circle
        int node = key < n_ ? R.bottom_node(K + (n_ - 1 - static_cast<int>(key)))
                            : R.top_node(K + (n_ - 1 - static_cast<int>(key - n_)));
        int rr = R.free_rank[R.comp[node]];
        if (rr < 0) throw std::logic_error("rho: dotted circle meets a platform");
        mask |= 1u << rr;
    }
    return mod_.index(mod_.bottom_index(ra), mod_.top_index(rb), mask);
}

std::string format_element(const ArcAlgebra& a, const ArcElement& x) {
    if (x.empty()) return "0";
    std::string s;
    for (const auto& [i, c] : x) {
        if (!s.empty()) s += " + ";
        if (c != LaurentPoly(1)) s += "(" + c.to_string() + ")";
        s += a.name(i);
    }
    return s;
}

}  // namespace qakh
