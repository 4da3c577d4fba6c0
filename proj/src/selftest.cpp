/**
 * @file selftest.cpp
 * @brief The twelve acceptance checks.
 */
#include "qakh/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <random>
#include <sstream>

#include "qakh/arc_algebra.hpp"
#include "qakh/classical.hpp"
#include "qakh/cobordism.hpp"
#include "qakh/corpus.hpp"
#include "qakh/hochschild.hpp"
#include "qakh/tqft.hpp"

namespace qakh {

namespace {

using Mat = SparseMatrix<LaurentPoly>;

std::vector<RingSpec> test_rings() {
    return {RingSpec::rationals(1), RingSpec::prime_field(5, 2), RingSpec::prime_field(7, 3)};
}

/// Collects failures; the first few end up in the detail line.
struct Tally {
    int ok = 0;
    std::vector<std::string> bad;
    void expect(bool cond, const std::string& what) {
        if (cond)
            ++ok;
        else
            bad.push_back(what);
    }
    CheckResult result(int id, std::string name, const std::string& summary) const {
        CheckResult r;
        r.id = id;
        r.name = std::move(name);
        r.pass = bad.empty();
        std::ostringstream s;
        s << summary << " (" << ok << "/" << ok + bad.size() << " ok)";
        for (size_t i = 0; i < bad.size() && i < 3; ++i) s << (i ? "; " : ": ") << bad[i];
        if (bad.size() > 3) s << "; ...";
        r.detail = s.str();
        return r;
    }
};

std::string cells_string(const HomologySummary& h) {
    std::ostringstream s;
    bool first = true;
    for (const auto& [key, c] : h.cells) {
        s << (first ? "" : " ") << "(" << key[0] << "," << key[1] << "," << key[2] << "):" << c.rank;
        first = false;
    }
    return s.str();
}

bool same_ranks(const HomologySummary& a, const HomologySummary& b) { return a.same_groups(b); }

void put(HomologySummary& h, int i, int j, int k, long rank) {
    if (rank) h.cells[{i, j, k}].rank += rank;
}

/// a == b in r.
bool scalar_eq(const RingSpec& r, const Scalar& a, long b) { return r.is_zero(r.sub(a, r.from_int(b))); }

}  // namespace

HomologySummary torus_closed_form(int n, const RingSpec& r) {
    HomologySummary h;
    h.ring = r.name();
    const Scalar q2 = r.pow_q(2);
    for (int k : {2, 0, -2}) put(h, 0, -n, k, 1);
    put(h, -n, -3 * n, 0, 1);
    for (int i = -n + 1; i <= -1; ++i) {
        const long s = (i % 2 == 0) ? 1 : -1;
        if (scalar_eq(r, q2, -s)) put(h, i, 2 * i - n, 0, 1);  // q^2 + (-1)^i = 0
    }
    for (int i = -n; i <= -2; ++i) {
        const long s = (i % 2 == 0) ? 1 : -1;
        if (scalar_eq(r, q2, s)) put(h, i, 2 * i - n + 2, 0, 1);  // q^2 - (-1)^i = 0
    }
    return h;
}

CheckResult check_torus_table() {
    Tally t;
    const auto w = parse_word("torus 2 5");
    const auto cx = build_complex(w);
    struct Regime {
        RingSpec r;
        std::vector<std::array<int, 3>> extra;
    };
    const std::vector<Regime> regimes{
        {RingSpec::rationals(3), {}},
        {RingSpec::rationals(1), {{-2, -7, 0}, {-1, -7, 0}, {-4, -11, 0}, {-3, -11, 0}}},
        {RingSpec::prime_field(5, 2), {{-3, -9, 0}, {-2, -9, 0}, {-5, -13, 0}, {-4, -13, 0}}},
    };
    for (const auto& g : regimes) {
        HomologySummary want;
        want.ring = g.r.name();
        for (int k : {2, 0, -2}) put(want, 0, -5, k, 1);
        put(want, -5, -15, 0, 1);
        for (const auto& c : g.extra) put(want, c[0], c[1], c[2], 1);
        const auto a = homology(cx, g.r);
        const auto b = qhh_annular(w, g.r);
        t.expect(same_ranks(a, want), g.r.name() + " tqft " + cells_string(a));
        t.expect(same_ranks(b, want), g.r.name() + " coinvariants " + cells_string(b));
    }
    return t.result(1, "torus-link table", "T(2,5) in three regimes, both pipelines");
}

CheckResult check_torus_closed_form(int max_n) {
    Tally t;
    const std::vector<RingSpec> rings{RingSpec::rationals(3), RingSpec::rationals(1), RingSpec::rationals(-1),
                                      RingSpec::prime_field(5, 2), RingSpec::prime_field(13, 5)};
    for (int n = 1; n <= max_n; ++n) {
        const auto w = parse_word("torus 2 " + std::to_string(n));
        const auto cx = build_complex(w);
        for (const auto& r : rings) {
            const auto got = homology(cx, r);
            const auto want = torus_closed_form(n, r);
            t.expect(same_ranks(got, want), "n=" + std::to_string(n) + " " + r.name() + " got " + cells_string(got));
        }
    }
    return t.result(2, "closed form", "T(2,n), n<=" + std::to_string(max_n) + ", generic / q^2=1 / q^2=-1");
}

CheckResult check_dual_pipeline(bool quick) {
    Tally t;
    const auto& words = corpus();
    int used = 0;
    for (const auto& e : words) {
        const auto w = e.word();
        if (w.crossing_count() > 6 || w.bottom > 3) continue;
        ++used;
        const auto cx = build_complex(w);
        for (const auto& r : test_rings()) {
            if (quick && r.characteristic() == 7 && w.crossing_count() > 4) continue;
            const auto a = homology(cx, r);
            const auto b = qhh_annular(w, r);
            t.expect(a.same_groups(b), e.name + " " + r.name());
        }
    }
    t.expect(used >= 25, "corpus has only " + std::to_string(used) + " words");
    return t.result(3, "dual pipeline", std::to_string(used) + " corpus words x 3 rings");
}

CheckResult check_classical_limit() {
    Tally t;
    const auto r = RingSpec::rationals(1);
    for (const auto& e : corpus()) {
        const auto w = e.word();
        const auto c = homology(classical_aps_complex(w), r);
        t.expect(homology(build_complex(w), r).same_groups(c), e.name + " tqft");
        t.expect(qhh_annular(w, r).same_groups(c), e.name + " coinvariants");
    }
    return t.result(4, "classical limit", "q=1 over Q against the classical annular functor");
}

CheckResult check_invariance(bool quick) {
    Tally t;
    const auto r = RingSpec::prime_field(7, 3);
    for (const auto& e : corpus()) {
        const auto w = e.word();
        if (quick && w.crossing_count() > 4) continue;
        const auto h = homology(build_complex(w), r);
        for (int k = 1; k < static_cast<int>(w.slices.size()); ++k)
            t.expect(homology(build_complex(rotate_closure(w, k)), r).same_groups(h),
                     e.name + " rotated by " + std::to_string(k));
    }
    for (const auto& p : move_pairs()) {
        const auto a = homology(build_complex(parse_word(p.before)), r);
        const auto b = homology(build_complex(parse_word(p.after)), r);
        HomologySummary want;
        if (!p.delooping_shift) {
            want = a;
        } else {
            for (const auto& [key, c] : a.cells) {  // (x) (q + q^-1)
                put(want, key[0], key[1] + 1, key[2], c.rank);
                put(want, key[0], key[1] - 1, key[2], c.rank);
            }
        }
        t.expect(want.same_groups(b), p.move);
    }
    return t.result(5, "invariance", "seam rotation, R1/R2 pairs, far circles over F7 q=3");
}

CheckResult check_arc_fixtures(int random_triples) {
    Tally t;
    ArcAlgebra a2(2);
    t.expect(a2.dimension() == 7, "dim H^2 = " + std::to_string(a2.dimension()));
    t.expect(a2.dimension(0) == 5, "weight-0 part = " + std::to_string(a2.dimension(0)));

    const int x = a2.find("01", "10"), y = a2.find("10", "01");
    const int dotted = a2.find("10", "10", 1);
    const auto xy = a2.multiply(a2.basis_element(x), a2.basis_element(y));
    const auto yx = a2.multiply(a2.basis_element(y), a2.basis_element(x));
    t.expect(xy == a2.basis_element(dotted), "(01|10)(10|01) = " + format_element(a2, xy));
    t.expect(yx.empty(), "(10|01)(01|10) = " + format_element(a2, yx));

    auto assoc = [&](const ArcAlgebra& A, int i, int j, int k) {
        const auto l = A.multiply(A.multiply(A.basis_element(i), A.basis_element(j)), A.basis_element(k));
        const auto r = A.multiply(A.basis_element(i), A.multiply(A.basis_element(j), A.basis_element(k)));
        return l == r;
    };
    for (int n = 0; n <= 2; ++n) {
        ArcAlgebra A(n);
        int fails = 0;
        for (int i = 0; i < A.dimension(); ++i)
            for (int j = 0; j < A.dimension(); ++j)
                for (int k = 0; k < A.dimension(); ++k) fails += !assoc(A, i, j, k);
        t.expect(fails == 0, "associativity n=" + std::to_string(n) + ": " + std::to_string(fails) + " failures");
    }
    {
        ArcAlgebra A(3);
        std::mt19937 rng(20240);
        std::uniform_int_distribution<int> pick(0, A.dimension() - 1);
        int fails = 0;
        for (int s = 0; s < random_triples; ++s) fails += !assoc(A, pick(rng), pick(rng), pick(rng));
        t.expect(fails == 0, "associativity n=3: " + std::to_string(fails) + " failures");
    }

    // Worked degrees. The first diagram carries one dot (-2).
    const int d1 = closure_degree(FlatTangle::identity(6), CupDiagram::from_code("101001"),
                                  CupDiagram::from_code("011010")) - 2;
    // (4,2)-tangle: bottom 0 to top 0, bottom 1-2 cap, bottom 3 to top 1, one loop.
    const auto tangle = FlatTangle::from_matching(4, 2, {4, 2, 1, 5, 0, 3}, 1);
    const int d2 = closure_degree(tangle, CupDiagram::from_code("1001"), CupDiagram::from_code("01"));
    t.expect(d1 == -4, "first worked degree = " + std::to_string(d1));
    t.expect(d2 == 1, "second worked degree = " + std::to_string(d2));
    return t.result(6, "arc algebra", "dimensions, products, associativity, degrees");
}

CheckResult check_hochschild() {
    Tally t;
    for (const auto& r : test_rings()) {
        for (int n = 0; n <= 3; ++n) {
            const int d = coinv_q(CKBimodule(FlatTangle::identity(n)), false, r).dim();
            t.expect(d == (1 << n), "coinv H^" + std::to_string(n) + " over " + r.name() + " = " + std::to_string(d));
        }
        for (int n = 0; n <= 2; ++n) {
            const int d = coinv_q(CKBimodule(FlatTangle::identity(2 * n)), true, r).dim();
            t.expect(d == (1 << n),
                     "twisted coinv H^" + std::to_string(2 * n) + " over " + r.name() + " = " + std::to_string(d));
        }
    }
    for (int n = 0; n <= 2; ++n) {
        for (const auto& r : {RingSpec::prime_field(5, 2), RingSpec::prime_field(7, 3)}) {
            const auto h = qhh_truncated(n, false, r, 3);
            auto it = h.homology.find(1);
            const long hh1 = it == h.homology.end() ? 0 : it->second;
            t.expect(hh1 == 0, "qHH_1(H^" + std::to_string(n) + ") over " + r.name() + " = " + std::to_string(hh1));
        }
    }
    const auto m = canonical_basis_map(2);
    const auto ds = enumerate_cup_diagrams(2);
    int col = -1;
    for (int c = 0; c < static_cast<int>(ds.size()); ++c)
        if (ds[c].notation() == "10") col = c;
    t.expect(col >= 0, "no cup diagram 10");
    if (col >= 0) {
        // rows: bit 1 = v-, factor 0 most significant
        bool ok = m.get(1, col) == LaurentPoly(1) && m.get(2, col) == LaurentPoly::q(-1) && m.get(0, col).is_zero() &&
                  m.get(3, col).is_zero();
        t.expect(ok, "cup idempotent maps to " + m.get(1, col).to_string() + " v+v- + " + m.get(2, col).to_string() +
                         " v-v+");
    }
    return t.result(7, "Hochschild", "coinvariant ranks, truncated qHH_1, canonical map");
}

CheckResult check_duality() {
    Tally t;
    const auto one = identity_matrix(2, LaurentPoly(1), kPolyOps);
    auto [l, r] = zigzags();
    t.expect(l == one, "left zigzag");
    t.expect(r == one, "right zigzag");
    const auto ev = ev_matrix();  // columns (v+v+, v+v-, v-v+, v-v-)
    t.expect(ev.get(0, 2) == LaurentPoly(1), "ev(v-, v+) = " + ev.get(0, 2).to_string());
    t.expect(ev.get(0, 1) == LaurentPoly::q(1), "ev(v+, v-) = " + ev.get(0, 1).to_string());
    t.expect(ev.get(0, 0).is_zero() && ev.get(0, 3).is_zero(), "ev on equal labels");
    const auto torus = torus_eval_check();
    t.expect(torus == LaurentPoly::q(1) + LaurentPoly::q(-1), "torus evaluation " + torus.to_string());
    return t.result(8, "duality", "zigzags, ev table, torus evaluation over Z[q,q^-1]");
}

CheckResult check_quantum_group() {
    Tally t;
    const auto r = RingSpec::prime_field(7, 3);
    for (int n = 0; n <= 3; ++n) {
        const auto E = specialize(uqsl2_operator('E', n), r), F = specialize(uqsl2_operator('F', n), r);
        const auto K = specialize(uqsl2_operator('K', n), r), Ki = specialize(uqsl2_operator('k', n), r);
        const auto one = identity_matrix(1 << n, r.from_int(1), r);
        const auto q2 = r.pow_q(2), qm2 = r.pow_q(-2);
        const std::string tag = " on V^" + std::to_string(n);
        t.expect(mat_mul(K, Ki, r) == one, "K K^-1 = 1" + tag);
        t.expect(mat_mul(mat_mul(K, E, r), Ki, r) == E.scaled(q2, r), "KEK^-1 = q^2 E" + tag);
        t.expect(mat_mul(mat_mul(K, F, r), Ki, r) == F.scaled(qm2, r), "KFK^-1 = q^-2 F" + tag);
        const auto comm = mat_add(mat_mul(E, F, r), mat_mul(F, E, r).scaled(r.from_int(-1), r), r);
        const auto diff = mat_add(K, Ki.scaled(r.from_int(-1), r), r);
        const auto qq = r.inv(r.sub(r.q(), r.inv(r.q())));
        t.expect(comm == diff.scaled(qq, r), "[E,F] = (K-K^-1)/(q-q^-1)" + tag);
    }
    for (int n = 1; n <= 4; ++n) {
        const auto w = parse_word("torus 2 " + std::to_string(n));
        const auto c = build_complex(w);
        for (char g : {'E', 'F', 'K', 'k'}) {
            const auto A = complex_uq_action(w, g);
            bool ok = true;
            for (const auto& [i, d] : c.d)
                if (!(mat_mul(d, A.at(i), kPolyOps) == mat_mul(A.at(i + 1), d, kPolyOps))) ok = false;
            t.expect(ok, std::string(1, g) + " vs d on T(2," + std::to_string(n) + ")");
        }
    }
    return t.result(9, "quantum group", "relations on V^n over F7 q=3, commutation with d");
}

CheckResult check_viro() {
    Tally t;
    int words = 0;
    for (const auto& e : corpus()) {
        if (words == 3) break;
        const auto w = e.word();
        const auto s = crossing_signs(w);
        for (int c = 0; c < static_cast<int>(s.size()); ++c) {
            if (s[c] <= 0) continue;
            std::string why;
            t.expect(viro_check(w, c, &why), e.name + " crossing " + std::to_string(c) + ": " + why);
            ++words;
            break;
        }
    }
    t.expect(words == 3, "found " + std::to_string(words) + " words with a positive crossing");
    return t.result(10, "Viro cone", "bracket = cone of the saddle at a positive crossing");
}

CheckResult check_mobius() {
    Tally t;
    const auto r1 = RingSpec::rationals(1), r5 = RingSpec::prime_field(5, 2);
    for (const auto& e : mobius_corpus()) {
        const auto w = e.word();
        const auto geo1 = homology(mobius_build_complex(w), r1);
        t.expect(geo1.same_groups(homology(classical_mobius_complex(w), r1)), e.name + " q=1 classical");
        const auto geo5 = homology(mobius_build_complex(w), r5);
        t.expect(geo5.same_groups(qhh_mobius(w, r5)), e.name + " twisted coinvariants over F5");
    }
    return t.result(11, "Mobius", std::to_string(mobius_corpus().size()) + " words, classical and twisted coinvariants");
}

CheckResult check_skein() {
    Tally t;
    const auto r = RingSpec::f4();
    const auto rep = skein_check(parse_word("", 1), r);
    t.expect(rep.holds, "trivial tangle: " + rep.note);
    t.expect(!rep.guard, "all three maps vanish");
    std::string why;
    t.expect(commutes_with_uq(rep.pos, &why), "S(pos) vs U_q: " + why);
    t.expect(commutes_with_uq(rep.neg, &why), "S(neg) vs U_q: " + why);
    std::ostringstream tw;
    for (int f : {1, -1}) {
        const auto tr = skein_check_twisted(f, r);
        tw << " twist " << f << ": " << (tr.holds ? "holds" : "fails");
        if (!tr.holds && tr.discrepancy != INT_MIN) tw << " (uniform q^" << tr.discrepancy << ")";
    }
    return t.result(12, "skein action", "F4 2-cable of the trivial tangle;" + tw.str());
}

std::vector<CheckResult> run_selftest(const SelftestOptions& opt, const std::function<void(const CheckResult&)>& progress) {
    using Fn = std::function<CheckResult()>;
    const bool quick = opt.quick;
    const std::vector<std::pair<int, Fn>> checks{
        {1, [] { return check_torus_table(); }},
        {2, [quick] { return check_torus_closed_form(quick ? 4 : 6); }},
        {3, [quick] { return check_dual_pipeline(quick); }},
        {4, [] { return check_classical_limit(); }},
        {5, [quick] { return check_invariance(quick); }},
        {6, [quick] { return check_arc_fixtures(quick ? 100 : 500); }},
        {7, [] { return check_hochschild(); }},
        {8, [] { return check_duality(); }},
        {9, [] { return check_quantum_group(); }},
        {10, [] { return check_viro(); }},
        {11, [] { return check_mobius(); }},
        {12, [] { return check_skein(); }},
    };
    std::vector<CheckResult> out;
    for (const auto& [id, fn] : checks) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.id = id;
            r.pass = false;
            r.name = "check " + std::to_string(id);
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) progress(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace qakh
