/**
 * @file tangle.cpp
 * @brief Word parsing, orientation propagation, resolution graphs, canonicalization, cube.
 */
#include "qakh/tangle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qakh {

// ---------------------------------------------------------------- TangleWord

int TangleWord::top() const { return widths().back(); }

std::vector<int> TangleWord::widths() const {
    std::vector<int> w{bottom};
    for (const auto& s : slices) {
        int cur = w.back();
        if (s.kind == SliceKind::Cup) cur += 2;
        if (s.kind == SliceKind::Cap) cur -= 2;
        w.push_back(cur);
    }
    return w;
}

int TangleWord::crossing_count() const {
    return static_cast<int>(std::count_if(slices.begin(), slices.end(), [](const Slice& s) { return s.is_crossing(); }));
}

std::vector<int> TangleWord::crossing_slices() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(slices.size()); ++i)
        if (slices[i].is_crossing()) out.push_back(i);
    return out;
}

bool TangleWord::closable() const {
    try {
        validate_word(*this, true);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

std::string TangleWord::to_string() const {
    std::ostringstream os;
    os << "strands: " << bottom << "\n";
    if (std::any_of(bottom_orient.begin(), bottom_orient.end(), [](int o) { return o < 0; })) {
        os << "orient: ";
        for (int o : bottom_orient) os << (o > 0 ? '+' : '-');
        os << "\n";
    }
    for (size_t i = 0; i < slices.size(); ++i) {
        static const char tok[6] = {'p', 'n', 'u', 'a', 'v', 'h'};
        os << (i ? " " : "") << tok[static_cast<int>(slices[i].kind)] << slices[i].pos;
        if (slices[i].kind == SliceKind::Cup && slices[i].orient) os << (slices[i].orient > 0 ? '+' : '-');
    }
    return os.str();
}

static bool widths_ok(const TangleWord& w, std::string* why) {
    int cur = w.bottom;
    for (size_t i = 0; i < w.slices.size(); ++i) {
        const auto& s = w.slices[i];
        bool ok = true;
        switch (s.kind) {
            case SliceKind::Cup: ok = s.pos >= 1 && s.pos <= cur + 1; break;
            default: ok = s.pos >= 1 && s.pos + 1 <= cur; break;
        }
        if (!ok) {
            if (why) *why = "slice " + std::to_string(i + 1) + " position " + std::to_string(s.pos) +
                            " out of range for width " + std::to_string(cur);
            return false;
        }
        if (s.kind == SliceKind::Cup) cur += 2;
        if (s.kind == SliceKind::Cap) cur -= 2;
    }
    return true;
}

TangleWord parse_word(const std::string& text, int strands) {
    std::istringstream is(text);
    std::vector<std::string> toks;
    for (std::string t; is >> t;) toks.push_back(t);

    TangleWord w;
    int header_strands = -1;
    std::string orient;
    for (size_t i = 0; i < toks.size(); ++i) {
        const std::string& t = toks[i];
        if (t.rfind("strands:", 0) == 0) {
            std::string rest = t.substr(8);
            if (rest.empty()) {
                if (i + 1 >= toks.size()) throw ParseError(ParseError::Kind::MalformedToken, "strands: missing count");
                rest = toks[++i];
            }
            try {
                header_strands = std::stoi(rest);
            } catch (...) {
                throw ParseError(ParseError::Kind::MalformedToken, "bad strand count '" + rest + "'");
            }
            continue;
        }
        if (t.rfind("orient:", 0) == 0) {
            orient = t.substr(7);
            while (i + 1 < toks.size() &&
                   toks[i + 1].find_first_not_of("+-") == std::string::npos)
                orient += toks[++i];
            continue;
        }
        if (t == "torus") {
            if (i + 2 >= toks.size() || toks[i + 1] != "2")
                throw ParseError(ParseError::Kind::MalformedToken, "expected 'torus 2 <n>'");
            int n = 0;
            try {
                n = std::stoi(toks[i + 2]);
            } catch (...) {
                throw ParseError(ParseError::Kind::MalformedToken, "bad torus parameter '" + toks[i + 2] + "'");
            }
            if (n < 0) throw ParseError(ParseError::Kind::MalformedToken, "torus parameter must be >= 0");
            for (int k = 0; k < n; ++k) w.slices.push_back({SliceKind::Neg, 1});
            if (header_strands < 0 && strands < 0) header_strands = 2;
            i += 2;
            continue;
        }
        std::string digits = t.substr(std::min<size_t>(1, t.size()));
        int cup_orient = 0;
        if (!t.empty() && t[0] == 'u' && !digits.empty() && (digits.back() == '+' || digits.back() == '-')) {
            cup_orient = digits.back() == '+' ? 1 : -1;
            digits.pop_back();
        }
        if (t.size() < 2 || std::string("pnuavh").find(t[0]) == std::string::npos || digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 6)
            throw ParseError(ParseError::Kind::MalformedToken, "malformed token '" + t + "'");
        Slice s{};
        s.pos = std::stoi(digits);
        s.orient = cup_orient;
        switch (t[0]) {
            case 'p': s.kind = SliceKind::Pos; break;
            case 'n': s.kind = SliceKind::Neg; break;
            case 'u': s.kind = SliceKind::Cup; break;
            case 'v': s.kind = SliceKind::Vert; break;
            case 'h': s.kind = SliceKind::Turn; break;
            default: s.kind = SliceKind::Cap; break;
        }
        w.slices.push_back(s);
    }
    if (header_strands >= 0) strands = header_strands;
    if (strands < 0) {
        // Smallest width that makes every slice legal.
        for (int n = 1; n <= 64; ++n) {
            w.bottom = n;
            if (widths_ok(w, nullptr)) {
                strands = n;
                break;
            }
        }
        if (strands < 0) throw ParseError(ParseError::Kind::WidthViolation, "no strand count makes the word valid");
    }
    w.bottom = strands;
    if (orient.empty()) {
        w.bottom_orient.assign(strands, 1);
    } else {
        if (static_cast<int>(orient.size()) != strands)
            throw ParseError(ParseError::Kind::MalformedToken, "orient: expected " + std::to_string(strands) + " signs");
        for (char c : orient) w.bottom_orient.push_back(c == '+' ? 1 : -1);
    }
    validate_word(w, false, !has_frozen_turnbacks(w));
    return w;
}

// ---------------------------------------------------------------- orientations

namespace {

struct PointRef {
    int level = -1, pos = -1;
};

/// Unresolved link diagram: up/down neighbor of every point.
struct LinkGraph {
    std::vector<std::vector<PointRef>> up, down;
};

LinkGraph link_graph(const TangleWord& w) {
    auto wd = w.widths();
    const int L = static_cast<int>(w.slices.size());
    LinkGraph g;
    g.up.resize(L + 1);
    g.down.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        g.up[l].assign(wd[l], PointRef{});
        g.down[l].assign(wd[l], PointRef{});
    }
    for (int s = 1; s <= L; ++s) {
        const auto& sl = w.slices[s - 1];
        const int c = sl.pos - 1;
        const int lo = s - 1, hi = s;
        auto link = [&](int pl, int ph) {  // vertical piece (lo,pl)-(hi,ph)
            g.up[lo][pl] = {hi, ph};
            g.down[hi][ph] = {lo, pl};
        };
        switch (sl.kind) {
            case SliceKind::Vert:
                for (int p = 0; p < wd[lo]; ++p) link(p, p);
                break;
            case SliceKind::Turn:
                for (int p = 0; p < wd[lo]; ++p)
                    if (p != c && p != c + 1) link(p, p);
                g.up[lo][c] = {lo, c + 1};
                g.up[lo][c + 1] = {lo, c};
                g.down[hi][c] = {hi, c + 1};
                g.down[hi][c + 1] = {hi, c};
                break;
            case SliceKind::Pos:
            case SliceKind::Neg:
                for (int p = 0; p < wd[lo]; ++p) {
                    if (p == c)
                        link(p, c + 1);
                    else if (p == c + 1)
                        link(p, c);
                    else
                        link(p, p);
                }
                break;
            case SliceKind::Cup:
                for (int p = 0; p < wd[lo]; ++p) link(p, p < c ? p : p + 2);
                g.down[hi][c] = {hi, c + 1};
                g.down[hi][c + 1] = {hi, c};
                break;
            case SliceKind::Cap:
                for (int p = 0; p < wd[lo]; ++p)
                    if (p < c)
                        link(p, p);
                    else if (p > c + 1)
                        link(p, p - 2);
                g.up[lo][c] = {lo, c + 1};
                g.up[lo][c + 1] = {lo, c};
                break;
        }
    }
    return g;
}

}  // namespace

std::vector<std::vector<int>> point_orientations(const TangleWord& w, Closure closure) {
    auto wd = w.widths();
    const int L = static_cast<int>(w.slices.size());
    auto g = link_graph(w);
    // Closure strands: orientations must survive going once around.
    if (closure != Closure::None && wd[L] == w.bottom && L > 0) {
        const int n = w.bottom;
        for (int p = 0; p < n; ++p) {
            int q = closure == Closure::Mobius ? n - 1 - p : p;
            g.up[L][p] = {0, q};
            g.down[0][q] = {L, p};
        }
    }
    std::vector<std::vector<int>> o(L + 1);
    for (int l = 0; l <= L; ++l) o[l].assign(wd[l], 0);

    // Walk forward from (l,p) with orientation d, writing sign * orientation.
    std::function<void(int, int, int, int)> walk = [&](int l, int p, int d, int sign) {
        while (true) {
            int want = d * sign;
            if (o[l][p] != 0) {
                if (o[l][p] != want)
                    throw ParseError(ParseError::Kind::Unclosable, "inconsistent strand orientations");
                return;
            }
            o[l][p] = want;
            PointRef nx = d > 0 ? g.up[l][p] : g.down[l][p];
            if (nx.level < 0) return;
            if (nx.level == l) d = -d;  // through a cap or cup (closure strands always change level)
            l = nx.level;
            p = nx.pos;
        }
    };
    auto orient_component = [&](int l, int p, int d) {
        walk(l, p, d, 1);
        o[l][p] = 0;
        walk(l, p, -d, -1);
    };
    for (int p = 0; p < w.bottom; ++p)
        if (o[0][p] == 0) orient_component(0, p, w.bottom_orient[p]);
    for (int s = 1; s <= L; ++s)
        if (w.slices[s - 1].kind == SliceKind::Cup) {
            int c = w.slices[s - 1].pos - 1;
            int want = w.slices[s - 1].orient;
            if (o[s][c] == 0) orient_component(s, c, want ? want : -1);  // new component: left leg down by default
            if (want && o[s][c] != want)
                throw ParseError(ParseError::Kind::Unclosable, "cup orientation contradicts its component");
        }
    return o;
}

bool has_frozen_turnbacks(const TangleWord& w) {
    return std::any_of(w.slices.begin(), w.slices.end(), [](const Slice& s) { return s.kind == SliceKind::Turn; });
}

void validate_word(const TangleWord& w, bool require_closable, bool oriented) {
    std::string why;
    if (w.bottom < 0) throw ParseError(ParseError::Kind::WidthViolation, "negative strand count");
    if (!widths_ok(w, &why)) throw ParseError(ParseError::Kind::WidthViolation, why);
    if (static_cast<int>(w.bottom_orient.size()) != w.bottom)
        throw ParseError(ParseError::Kind::MalformedToken, "orientation count does not match strands");
    if (require_closable && w.top() != w.bottom)
        throw ParseError(ParseError::Kind::Unclosable, "top and bottom strand counts differ");
    if (!oriented) return;
    auto o = point_orientations(w, require_closable ? Closure::Annular : Closure::None);
    for (int p = 0; p < w.bottom; ++p)
        if (o[0][p] != w.bottom_orient[p])
            throw ParseError(ParseError::Kind::Unclosable,
                             "orientation of strand " + std::to_string(p + 1) + " contradicts the other strands");
    if (require_closable) {
        for (int p = 0; p < w.bottom; ++p)
            if (o.back()[p] != o.front()[p])
                throw ParseError(ParseError::Kind::Unclosable,
                                 "orientation mismatch at strand " + std::to_string(p + 1) + " after closure");
    }
}

void validate_closure(const TangleWord& w, Closure closure) {
    if (closure != Closure::Mobius) {
        validate_word(w, true);
        return;
    }
    validate_word(w, true, false);
    auto o = point_orientations(w, Closure::Mobius);
    const int n = w.bottom;
    for (int p = 0; p < n; ++p) {
        if (o[0][p] != w.bottom_orient[p])
            throw ParseError(ParseError::Kind::Unclosable, "orientation header contradicts the Mobius closure");
        if (o.back()[p] != o.front()[n - 1 - p])
            throw ParseError(ParseError::Kind::Unclosable, "orientation mismatch after Mobius closure");
    }
}

std::vector<int> crossing_signs(const TangleWord& w, Closure closure) {
    auto o = point_orientations(w, closure);
    std::vector<int> out;
    for (int s = 1; s <= static_cast<int>(w.slices.size()); ++s) {
        const auto& sl = w.slices[s - 1];
        if (!sl.is_crossing()) continue;
        int c = sl.pos - 1;
        int base = sl.kind == SliceKind::Pos ? 1 : -1;
        out.push_back(base * o[s - 1][c] * o[s - 1][c + 1]);
    }
    return out;
}

int writhe(const TangleWord& w) {
    int s = 0;
    for (int x : crossing_signs(w)) s += x;
    return s;
}

TangleWord rotate_closure(const TangleWord& w, int k) {
    const int L = static_cast<int>(w.slices.size());
    if (L == 0) return w;
    k = ((k % L) + L) % L;
    if (k == 0) return w;
    auto o = point_orientations(w);
    TangleWord r;
    r.bottom = w.widths()[k];
    r.bottom_orient = o[k];
    for (int i = 0; i < L; ++i) {
        Slice sl = w.slices[(k + i) % L];
        if (sl.kind == SliceKind::Cup) sl.orient = o[(k + i) % L + 1][sl.pos - 1];
        r.slices.push_back(sl);
    }
    return r;
}

// ---------------------------------------------------------------- CurveGraph

int CurveGraph::add_node() {
    slots_.push_back({-1, -1});
    return static_cast<int>(slots_.size()) - 1;
}

int CurveGraph::add_edge(int a, int b, int seam) {
    if (a == b) throw std::logic_error("CurveGraph: self loop");
    int e = static_cast<int>(edges_.size());
    edges_.push_back({a, b, seam});
    for (int v : {a, b}) {
        auto& s = slots_[v];
        if (s[0] < 0)
            s[0] = e;
        else if (s[1] < 0)
            s[1] = e;
        else
            throw std::logic_error("CurveGraph: node degree exceeds 2");
    }
    return e;
}

int CurveGraph::components(std::vector<int>& comp) const {
    const int n = size();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges_) parent[find(e.a)] = find(e.b);
    comp.assign(n, -1);
    int count = 0;
    std::vector<int> label(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (label[r] < 0) label[r] = count++;
        comp[i] = label[r];
    }
    return count;
}

CurveGraph::Walk CurveGraph::walk(int v) const {
    Walk w;
    // Find an endpoint, if any.
    int start = v, prev_edge = -1;
    {
        int cur = v, pe = -1;
        while (true) {
            if (degree(cur) < 2) {
                start = cur;
                break;
            }
            int e = slots_[cur][0] == pe ? slots_[cur][1] : slots_[cur][0];
            pe = e;
            cur = other(e, cur);
            if (cur == v) {
                start = v;
                w.closed = true;
                break;
            }
        }
    }
    int cur = start;
    (void)prev_edge;
    int pe = -1;
    while (true) {
        w.nodes.push_back(cur);
        int e = -1;
        for (int s : slots_[cur])
            if (s >= 0 && s != pe) {
                e = s;
                break;
            }
        if (e < 0) break;
        const auto& ed = edges_[e];
        int nxt = other(e, cur);
        if (ed.seam != 0) {
            int dir = (ed.a == cur ? 1 : -1) * (ed.seam > 0 ? 1 : -1);
            w.seam.push_back(dir);
            w.seam_pos.push_back(std::abs(ed.seam));
        }
        pe = e;
        cur = nxt;
        if (w.closed && cur == start) break;
    }
    return w;
}

// ---------------------------------------------------------------- resolution graphs

bool smoothing_is_vertical(const TangleWord& w, int c, int b) {
    auto idx = w.crossing_slices();
    const auto& s = w.slices[idx.at(c)];
    return s.kind == SliceKind::Pos ? b == 0 : b == 1;
}

ResolutionGraph resolution_graph(const TangleWord& w, const std::vector<int>& xi, Closure closure, int skip_site) {
    ResolutionGraph rg;
    rg.widths = w.widths();
    std::vector<Slice> slices = w.slices;
    if (slices.empty()) rg.widths.push_back(w.bottom);  // identity slice keeps bottom and top apart
    const int L = static_cast<int>(rg.widths.size()) - 1;
    for (int l = 0; l <= L; ++l) {
        rg.level_offset.push_back(rg.g.size());
        for (int p = 0; p < rg.widths[l]; ++p) rg.g.add_node();
    }
    int crossing = 0;
    for (int s = 1; s <= L; ++s) {
        const int lo = s - 1, hi = s;
        if (s > static_cast<int>(slices.size())) {
            for (int p = 0; p < rg.widths[lo]; ++p) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p));
            continue;
        }
        const auto& sl = slices[s - 1];
        const int c = sl.pos - 1;
        switch (sl.kind) {
            case SliceKind::Pos:
            case SliceKind::Neg: {
                for (int p = 0; p < rg.widths[lo]; ++p)
                    if (p != c && p != c + 1) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p));
                if (crossing != skip_site) {
                    bool vertical = sl.kind == SliceKind::Pos ? xi.at(crossing) == 0 : xi.at(crossing) == 1;
                    if (vertical) {
                        rg.g.add_edge(rg.node(lo, c), rg.node(hi, c));
                        rg.g.add_edge(rg.node(lo, c + 1), rg.node(hi, c + 1));
                    } else {
                        rg.g.add_edge(rg.node(lo, c), rg.node(lo, c + 1));
                        rg.g.add_edge(rg.node(hi, c), rg.node(hi, c + 1));
                    }
                }
                ++crossing;
                break;
            }
            case SliceKind::Vert:
                for (int p = 0; p < rg.widths[lo]; ++p) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p));
                break;
            case SliceKind::Turn:
                for (int p = 0; p < rg.widths[lo]; ++p)
                    if (p != c && p != c + 1) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p));
                rg.g.add_edge(rg.node(lo, c), rg.node(lo, c + 1));
                rg.g.add_edge(rg.node(hi, c), rg.node(hi, c + 1));
                break;
            case SliceKind::Cup:
                for (int p = 0; p < rg.widths[lo]; ++p) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p < c ? p : p + 2));
                rg.g.add_edge(rg.node(hi, c), rg.node(hi, c + 1));
                break;
            case SliceKind::Cap:
                for (int p = 0; p < rg.widths[lo]; ++p) {
                    if (p < c) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p));
                    if (p > c + 1) rg.g.add_edge(rg.node(lo, p), rg.node(hi, p - 2));
                }
                rg.g.add_edge(rg.node(lo, c), rg.node(lo, c + 1));
                break;
        }
    }
    const int n = rg.widths[0];
    if (closure == Closure::Annular)
        for (int p = 0; p < n; ++p) rg.g.add_edge(rg.node(L, p), rg.node(0, p), p + 1);
    if (closure == Closure::Mobius)
        for (int p = 0; p < n; ++p) rg.g.add_edge(rg.node(L, p), rg.node(0, n - 1 - p), p + 1);
    return rg;
}

std::array<int, 4> site_nodes(const TangleWord& w, const ResolutionGraph& rg, int c) {
    int s = w.crossing_slices().at(c) + 1;
    int p = w.slices[s - 1].pos - 1;
    return {rg.node(s - 1, p), rg.node(s - 1, p + 1), rg.node(s, p), rg.node(s, p + 1)};
}

// ---------------------------------------------------------------- annular curves

int RawCircle::algebraic() const {
    int a = 0;
    for (int s : seam_sign) a += s;
    return a;
}

int Transcript::total_q_power() const {
    int t = 0;
    for (const auto& s : steps) t += s.q_exp;
    return t;
}

bool Transcript::is_identity() const { return steps.empty(); }

RawCurveData raw_curves(const TangleWord& w, const std::vector<int>& xi) {
    auto rg = resolution_graph(w, xi, Closure::Annular);
    std::vector<int> comp;
    int count = rg.g.components(comp);
    RawCurveData raw;
    raw.circles.resize(count);
    std::vector<char> seen(count, 0);
    for (int v = 0; v < rg.g.size(); ++v) {
        if (seen[comp[v]]) continue;
        seen[comp[v]] = 1;
        auto wk = rg.g.walk(v);
        raw.circles[comp[v]].seam_sign = wk.seam;
        raw.circles[comp[v]].seam_pos = wk.seam_pos;
    }
    return raw;
}

namespace {

struct Candidate {
    int circle, idx;  // arc from crossing idx to idx+1 (cyclic)
    bool positive;
};

std::vector<Candidate> retractible(const RawCurveData& cur) {
    std::vector<Candidate> neg, pos;
    for (int ci = 0; ci < static_cast<int>(cur.circles.size()); ++ci) {
        const auto& c = cur.circles[ci];
        const int m = static_cast<int>(c.seam_sign.size());
        if (m < 2) continue;
        for (int i = 0; i < m; ++i) {
            int j = (i + 1) % m;
            if (c.seam_sign[i] == c.seam_sign[j]) continue;
            int a = std::min(c.seam_pos[i], c.seam_pos[j]), b = std::max(c.seam_pos[i], c.seam_pos[j]);
            bool blocked = false;
            for (int cj = 0; cj < static_cast<int>(cur.circles.size()) && !blocked; ++cj) {
                const auto& o = cur.circles[cj];
                for (int k = 0; k < static_cast<int>(o.seam_pos.size()); ++k) {
                    if (cj == ci && (k == i || k == j)) continue;
                    if (o.seam_pos[k] > a && o.seam_pos[k] < b) {
                        blocked = true;
                        break;
                    }
                }
            }
            if (blocked) continue;
            // (+,-): the arc hangs into the strip from below, on the positive side.
            bool positive = c.seam_sign[i] > 0;
            (positive ? pos : neg).push_back({ci, i, positive});
        }
    }
    return neg.empty() ? pos : neg;
}

AnnularCurveConfig finish(const RawCurveData& raw, const RawCurveData& cur, std::vector<RetractionStep> steps) {
    AnnularCurveConfig cfg;
    cfg.canonical_raw = cur;
    cfg.transcript.steps = std::move(steps);
    std::vector<std::pair<int, int>> ess;  // (seam position, raw index)
    for (int ci = 0; ci < static_cast<int>(cur.circles.size()); ++ci) {
        const auto& c = cur.circles[ci];
        if (c.seam_sign.size() == 1)
            ess.push_back({c.seam_pos[0], ci});
        else if (c.seam_sign.empty())
            cfg.trivial_circles.push_back({ci});
        else
            throw std::logic_error("canonicalize: circle left with several seam points");
    }
    std::sort(ess.begin(), ess.end());
    cfg.essential_count = static_cast<int>(ess.size());
    for (const auto& e : ess) cfg.essential_raw.push_back(e.second);
    auto power_of = [&](int ci) {
        int qp = 0;
        for (const auto& s : cfg.transcript.steps)
            if (s.circle == ci) qp += s.q_exp;
        return qp;
    };
    for (int k = 0; k < cfg.essential_count; ++k)
        cfg.transcript.entries.push_back({cfg.essential_raw[k], true, k, power_of(cfg.essential_raw[k])});
    for (int k = 0; k < static_cast<int>(cfg.trivial_circles.size()); ++k)
        cfg.transcript.entries.push_back({cfg.trivial_circles[k].raw_index, false, k, power_of(cfg.trivial_circles[k].raw_index)});
    std::sort(cfg.transcript.entries.begin(), cfg.transcript.entries.end(),
              [](const TranscriptEntry& a, const TranscriptEntry& b) { return a.raw_index < b.raw_index; });
    (void)raw;
    return cfg;
}

void apply(RawCurveData& cur, const Candidate& cand, std::vector<RetractionStep>& steps) {
    auto& c = cur.circles[cand.circle];
    const int m = static_cast<int>(c.seam_sign.size());
    int i = cand.idx, j = (cand.idx + 1) % m;
    steps.push_back({cand.circle, c.seam_pos[i], c.seam_pos[j], cand.positive, cand.positive ? -1 : 1});
    for (int k : {std::max(i, j), std::min(i, j)}) {
        c.seam_sign.erase(c.seam_sign.begin() + k);
        c.seam_pos.erase(c.seam_pos.begin() + k);
    }
}

}  // namespace

AnnularCurveConfig canonicalize(const RawCurveData& raw, const std::vector<int>& order) {
    RawCurveData cur = raw;
    std::vector<RetractionStep> steps;
    for (size_t step = 0;; ++step) {
        auto cands = retractible(cur);
        if (cands.empty()) break;
        size_t pick = step < order.size() ? static_cast<size_t>(order[step]) % cands.size() : 0;
        apply(cur, cands[pick], steps);
    }
    return finish(raw, cur, steps);
}

std::vector<AnnularCurveConfig> canonicalize_all_orders(const RawCurveData& raw) {
    std::vector<AnnularCurveConfig> outs;
    std::set<std::vector<std::array<int, 4>>> seen;
    std::function<void(RawCurveData, std::vector<RetractionStep>)> dfs = [&](RawCurveData cur,
                                                                                std::vector<RetractionStep> steps) {
        auto cands = retractible(cur);
        if (cands.empty()) {
            auto cfg = finish(raw, cur, steps);
            std::vector<std::array<int, 4>> key;
            for (const auto& e : cfg.transcript.entries)
                key.push_back({e.raw_index, e.essential ? 1 : 0, e.canonical_index, e.q_power});
            if (seen.insert(key).second) outs.push_back(cfg);
            return;
        }
        for (const auto& c : cands) {
            auto nc = cur;
            auto ns = steps;
            apply(nc, c, ns);
            dfs(nc, ns);
        }
    };
    dfs(raw, {});
    return outs;
}

AnnularCurveConfig resolve(const TangleWord& w, const std::vector<int>& xi) { return canonicalize(raw_curves(w, xi)); }

// ---------------------------------------------------------------- cube

int edge_sign(unsigned mask, int bit) {
    unsigned below = mask & ((1u << bit) - 1u);
    return (__builtin_popcount(below) % 2) ? -1 : 1;
}

std::vector<int> mask_bits(unsigned mask, int n) {
    std::vector<int> xi(n);
    for (int c = 0; c < n; ++c) xi[c] = (mask >> c) & 1u;
    return xi;
}

CubeOfResolutions build_cube(const TangleWord& w) {
    validate_word(w, true, !has_frozen_turnbacks(w));
    CubeOfResolutions cube;
    const int n = w.crossing_count();
    if (n > 20) throw std::invalid_argument("build_cube: too many crossings");
    cube.crossings = n;
    if (!has_frozen_turnbacks(w))
        for (int s : crossing_signs(w)) (s > 0 ? cube.n_plus : cube.n_minus)++;
    const unsigned N = 1u << n;
    cube.vertices.resize(N);
    std::vector<std::vector<int>> comps(N);
    std::vector<ResolutionGraph> graphs(N);
    for (unsigned m = 0; m < N; ++m) {
        auto xi = mask_bits(m, n);
        cube.vertices[m] = resolve(w, xi);
        graphs[m] = resolution_graph(w, xi, Closure::Annular);
        graphs[m].g.components(comps[m]);
    }
    for (unsigned m = 0; m < N; ++m)
        for (int b = 0; b < n; ++b) {
            if (m & (1u << b)) continue;
            unsigned t = m | (1u << b);
            CubeEdge e{m, t, b, edge_sign(m, b), false, {}, {}};
            auto sn = site_nodes(w, graphs[m], b);
            std::set<int> src, dst;
            for (int v : sn) {
                src.insert(comps[m][v]);
                dst.insert(comps[t][v]);
            }
            e.source_circles.assign(src.begin(), src.end());
            e.target_circles.assign(dst.begin(), dst.end());
            e.merge = src.size() == 2;
            cube.edges.push_back(e);
        }
    return cube;
}

bool squares_anticommute(const CubeOfResolutions& cube, int* squares_checked) {
    std::map<std::pair<unsigned, int>, int> sign;
    for (const auto& e : cube.edges) sign[{e.from, e.bit}] = e.sign;
    int count = 0;
    const unsigned N = 1u << cube.crossings;
    for (unsigned m = 0; m < N; ++m)
        for (int i = 0; i < cube.crossings; ++i)
            for (int j = i + 1; j < cube.crossings; ++j) {
                if ((m >> i) & 1u || (m >> j) & 1u) continue;
                int p = sign[{m, i}] * sign[{m | (1u << i), j}] * sign[{m, j}] * sign[{m | (1u << j), i}];
                ++count;
                if (p != -1) return false;
            }
    if (squares_checked) *squares_checked = count;
    return true;
}

}  // namespace qakh
