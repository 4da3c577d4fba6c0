/**
 * @file cli.cpp
 * @brief Command-line driver.
 */
#include "qakh/cli.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qakh/arc_algebra.hpp"
#include "qakh/ck_bimodule.hpp"
#include "qakh/cobordism.hpp"
#include "qakh/hochschild.hpp"
#include "qakh/selftest.hpp"
#include "qakh/tqft.hpp"

namespace qakh {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

/// An empty word means the 1-strand identity unless a width is given.
TangleWord load_word(const std::string& text, int strands) {
    if (strands < 0 && blank(text)) strands = 1;
    return parse_word(text, strands);
}

std::string one_line(const TangleWord& w) {
    std::string s = w.to_string();
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

RingSpec load_ring(const JobConfig& c) {
    try {
        return RingSpec::parse(c.ring, c.q);
    } catch (const RingError&) {
        throw;
    } catch (const std::exception& e) {
        throw RingError("bad ring or q: --ring " + c.ring + " --q " + c.q);
    }
}

std::string config_line(const nlohmann::json& cfg) {
    std::ostringstream s;
    bool first = true;
    for (const auto& [k, v] : cfg.items()) {
        s << (first ? "# " : ", ") << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
        first = false;
    }
    return s.str();
}

std::string matrix_row(const SparseMatrix<Scalar>& m, int r, const RingSpec& ring) {
    std::string s;
    for (int c = 0; c < m.cols(); ++c) s += (c ? " " : "") + ring.format(m.get(r, c));
    return s;
}

nlohmann::json matrix_json(const SparseMatrix<Scalar>& m, const RingSpec& ring) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(ring.format(m.get(r, c)));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- homology

int run_homology(const JobConfig& c, std::ostream& out) {
    const std::string text = c.file.empty() ? c.word : read_file(c.file);
    const TangleWord w = load_word(text, c.strands);
    const bool mobius = c.geometry == "mobius";
    validate_closure(w, mobius ? Closure::Mobius : Closure::Annular);
    const RingSpec r = load_ring(c);

    long est = estimate_generators(w);
    if (c.pipeline != "tqft") est <<= std::min(2 * w.bottom, 20);
    if (est > c.max_generators)
        throw ResourceError("estimated " + std::to_string(est) + " generators exceed --max-generators " +
                            std::to_string(c.max_generators));

    std::optional<HomologySummary> tq, hh;
    if (c.pipeline != "hochschild") tq = homology(mobius ? mobius_build_complex(w) : build_complex(w), r);
    if (c.pipeline != "tqft") hh = mobius ? qhh_mobius(w, r) : qhh_annular(w, r);
    const HomologySummary& h = tq ? *tq : *hh;
    std::string verdict;
    if (tq && hh) verdict = tq->same_groups(*hh) ? "MATCH" : "MISMATCH";

    auto cfg = c.to_json();
    cfg["word"] = one_line(w);
    if (c.output == "json") {
        nlohmann::json j{{"config", cfg}, {"homology", h.to_json()}, {"verdict", verdict.empty() ? nullptr : nlohmann::json(verdict)}};
        if (verdict == "MISMATCH") j["homology_hochschild"] = hh->to_json();
        out << j.dump(2) << "\n";
    } else if (c.output == "csv") {
        out << poincare_csv(h);
        if (verdict == "MISMATCH") out << "# hochschild\n" << poincare_csv(*hh);
    } else {
        out << config_line(cfg) << "\n" << poincare_table(h);
        if (verdict == "MISMATCH") out << "hochschild pipeline:\n" << poincare_table(*hh);
        if (!verdict.empty()) out << "verdict: " << verdict << "\n";
    }
    return verdict == "MISMATCH" ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------- arc-algebra

int run_arc_algebra(const JobConfig& c, std::ostream& out) {
    if (c.n < 0) throw std::invalid_argument("--n must be nonnegative");
    if (c.n > 5) throw ResourceError("arc algebra H^" + std::to_string(c.n) + " is above the supported size (n <= 5)");
    if (c.twisted && c.n % 2) throw std::invalid_argument("twisted coinvariants need even n");
    const RingSpec r = load_ring(c);
    const ArcAlgebra& A = arc_algebra(c.n);

    std::map<int, int> by_weight, by_degree;
    for (int i = 0; i < A.dimension(); ++i) {
        by_weight[A.module().gen(i).weight]++;
        by_degree[A.degree(i)]++;
    }
    const int coinv = coinv_q(CKBimodule(FlatTangle::identity(c.n)), c.twisted, r).dim();
    std::optional<TruncatedHH> hh;
    if (c.truncation > 0) hh = qhh_truncated(c.n, c.twisted, r, c.truncation, c.max_generators);

    if (c.output == "json") {
        nlohmann::json j{{"config", c.to_json()}, {"dimension", A.dimension()}, {"coinvariants", coinv}};
        nlohmann::json w = nlohmann::json::object(), d = nlohmann::json::object();
        for (auto [k, v] : by_weight) w[std::to_string(k)] = v;
        for (auto [k, v] : by_degree) d[std::to_string(k)] = v;
        j["by_weight"] = w;
        j["by_degree"] = d;
        if (hh) {
            nlohmann::json t = nlohmann::json::array();
            for (auto [k, v] : hh->chain_dims) {
                nlohmann::json e{{"k", k}, {"chain_dim", v}};
                if (hh->homology.count(k)) e["qHH"] = hh->homology.at(k);
                t.push_back(e);
            }
            j["truncated"] = t;
        }
        out << j.dump(2) << "\n";
    } else if (c.output == "csv") {
        out << "kind,index,value\n";
        for (auto [k, v] : by_weight) out << "weight," << k << "," << v << "\n";
        for (auto [k, v] : by_degree) out << "degree," << k << "," << v << "\n";
        out << "coinvariants,0," << coinv << "\n";
        if (hh)
            for (auto [k, v] : hh->homology) out << "qHH," << k << "," << v << "\n";
    } else {
        out << config_line(c.to_json()) << "\n";
        out << "H^" << c.n << ": dimension " << A.dimension() << "\n";
        out << "by weight:";
        for (auto [k, v] : by_weight) out << " " << k << ":" << v;
        out << "\nby degree:";
        for (auto [k, v] : by_degree) out << " " << k << ":" << v;
        out << "\n" << (c.twisted ? "twisted " : "") << "quantum coinvariants: " << coinv << "\n";
        if (hh) {
            for (auto [k, v] : hh->chain_dims) {
                out << "C_" << k << " = " << v;
                if (hh->homology.count(k)) out << ", qHH_" << k << " = " << hh->homology.at(k);
                out << "\n";
            }
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- action

int run_action(const JobConfig& c, std::ostream& out) {
    const RingSpec r = load_ring(c);
    if (r.characteristic() != 2) throw RingError("the action is computed in characteristic 2 only, got " + r.name());
    const TangleWord tp = parse_word(read_file(c.braid_file));
    TangleAction act;
    SkeinReport skein;
    if (c.twists != 0) {
        act = full_twist_action(c.twists, tp, r);
        skein = skein_check_twisted(c.twists, r);
    } else {
        const TangleWord t = load_word(c.tangle_file.empty() ? "" : read_file(c.tangle_file), -1);
        act = tangle_action(t, tp, r);
        skein = skein_check(t, r);
    }
    std::string why;
    const bool trivial = c.twists == 0 && act.cable.crossing_count() == 0;
    std::optional<bool> uq;
    if (trivial) uq = commutes_with_uq(act, &why);

    nlohmann::json cfg = c.to_json();
    cfg["ring"] = r.name();
    cfg["cable"] = one_line(act.cable);
    if (c.output == "json") {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [i, mat] : act.matrix) m[std::to_string(i)] = matrix_json(mat, r);
        nlohmann::json j{{"config", cfg}, {"dimension", act.dim()}, {"action", m}};
        j["skein"] = {{"holds", skein.holds}, {"note", skein.note}};
        if (!skein.holds && skein.discrepancy != INT_MIN) j["skein"]["discrepancy"] = skein.discrepancy;
        j["commutes_with_uq"] = uq ? nlohmann::json(*uq) : nlohmann::json(nullptr);
        out << j.dump(2) << "\n";
    } else {
        out << config_line(cfg) << "\n";
        for (const auto& [i, mat] : act.matrix) {
            out << "H^" << i << " (dim " << mat.rows() << ")\n";
            for (int row = 0; row < mat.rows(); ++row) out << "  " << matrix_row(mat, row, r) << "\n";
        }
        out << "skein: " << (skein.holds ? "holds" : "fails");
        if (!skein.note.empty()) out << " (" << skein.note << ")";
        out << "\n";
        if (uq) out << "commutes with E, F, K: " << (*uq ? "yes" : "no " + why) << "\n";
    }
    return skein.holds && uq.value_or(true) ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- selftest

int run_selftest_cmd(const JobConfig& c, std::ostream& out) {
    SelftestOptions opt;
    opt.quick = c.quick;
    opt.only = c.only;
    nlohmann::json arr = nlohmann::json::array();
    const bool json = c.output == "json";
    const auto results = run_selftest(opt, [&](const CheckResult& r) {
        if (json) return;
        out << (r.pass ? "PASS" : "FAIL") << " " << r.id << " " << r.name << ": " << r.detail << std::endl;
    });
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.pass;
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    if (json) out << nlohmann::json{{"config", c.to_json()}, {"checks", arr}, {"verdict", ok ? "PASS" : "FAIL"}}.dump(2) << "\n";
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

nlohmann::json JobConfig::to_json() const {
    nlohmann::json j{{"subcommand", subcommand}, {"output", output}};
    if (subcommand == "homology") {
        j["ring"] = ring;
        j["q"] = q;
        j["pipeline"] = pipeline;
        j["geometry"] = geometry;
    } else if (subcommand == "arc-algebra") {
        j["ring"] = ring;
        j["q"] = q;
        j["n"] = n;
        j["twisted"] = twisted;
        j["truncation"] = truncation;
    } else if (subcommand == "action") {
        j["q"] = q;
        j["twists"] = twists;
    } else if (subcommand == "selftest") {
        j["quick"] = quick;
    }
    return j;
}

long estimate_generators(const TangleWord& w) {
    int cups = 0, maxw = 0;
    for (const auto& s : w.slices) cups += s.kind == SliceKind::Cup;
    for (int x : w.widths()) maxw = std::max(maxw, x);
    const int m = w.crossing_count();
    const int exp = m + m + cups + maxw;  // cube size times 2^(circles), circles <= m + cups + width
    return exp >= 62 ? LONG_MAX : (1L << exp);
}

int run_job(const JobConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.subcommand == "homology") return run_homology(c, out);
        if (c.subcommand == "arc-algebra") return run_arc_algebra(c, out);
        if (c.subcommand == "action") return run_action(c, out);
        if (c.subcommand == "selftest") return run_selftest_cmd(c, out);
        err << "error: unknown subcommand " << c.subcommand << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const RingError& e) {
        err << "ring error: " << e.what() << "\n";
        return kExitRing;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::length_error& e) {
        err << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::invalid_argument& e) {
        err << "unsupported: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    JobConfig c;
    CLI::App app{"Quantum annular Khovanov homology"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "All subcommands");

    auto add_ring = [&](CLI::App* s) {
        s->add_option("--ring", c.ring, "Z, Q, F<p> or F4")->capture_default_str();
        s->add_option("--q", c.q, "value of q (integer, rational, or w for F4)")->capture_default_str();
        s->add_option("--output", c.output, "table, json or csv")
            ->check(CLI::IsMember({"table", "json", "csv"}))
            ->capture_default_str();
        s->add_option("--max-generators", c.max_generators, "resource ceiling")->capture_default_str();
    };

    auto* hom = app.add_subcommand("homology", "Trigraded homology of the closure of a word");
    auto* src = hom->add_option_group("source");
    src->add_option("--word", c.word, "word text");
    src->add_option("--file", c.file, "file holding the word")->check(CLI::ExistingFile);
    src->require_option(1);
    hom->add_option("--strands", c.strands, "number of strands (overrides the header)");
    hom->add_option("--pipeline", c.pipeline, "tqft, hochschild or both")
        ->check(CLI::IsMember({"tqft", "hochschild", "both"}))
        ->capture_default_str();
    hom->add_option("--geometry", c.geometry, "annulus or mobius")
        ->check(CLI::IsMember({"annulus", "mobius"}))
        ->capture_default_str();
    add_ring(hom);

    auto* arc = app.add_subcommand("arc-algebra", "Arc algebra H^n, its coinvariants and truncated qHH");
    arc->add_option("--n", c.n, "number of points")->capture_default_str();
    arc->add_option("--truncation", c.truncation, "bar complex length N (0: skip)")->capture_default_str();
    arc->add_flag("--twisted", c.twisted, "twist by the reflection");
    add_ring(arc);

    auto* act = app.add_subcommand("action", "Action of a braid word T' on homology of the 2-cable of T");
    act->add_option("tangle", c.tangle_file, "file with the (1,1) word T (empty file: trivial tangle)")
        ->required()
        ->check(CLI::ExistingFile);
    act->add_option("braid", c.braid_file, "file with the braid word T'")->required()->check(CLI::ExistingFile);
    act->add_option("--twists", c.twists, "replace the cable of T by this power of the full twist");
    add_ring(act);

    auto* st = app.add_subcommand("selftest", "Run the acceptance suite");
    st->add_flag("--quick", c.quick, "smaller samples");
    st->add_option("--only", c.only, "check ids");
    st->add_option("--output", c.output, "table or json")->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    for (auto* s : {hom, arc, act, st})
        if (s->parsed()) c.subcommand = s->get_name();
    if (act->parsed() && act->count("--ring") == 0) {  // characteristic 2 by default
        c.ring = "F4";
        if (act->count("--q") == 0) c.q = "w";
    }
    return run_job(c, out, err);
}

}  // namespace qakh
