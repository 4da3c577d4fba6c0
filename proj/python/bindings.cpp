/**
 * @file bindings.cpp
 * @brief Python module _qakh: homology, arc algebra sizes, the self-test and the CLI.
 */
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qakh/ck_bimodule.hpp"
#include "qakh/cli.hpp"
#include "qakh/hochschild.hpp"
#include "qakh/selftest.hpp"
#include "qakh/tqft.hpp"

namespace py = pybind11;
using namespace qakh;

namespace {

using Cell = std::tuple<int, int, int, long, std::vector<long>>;

std::vector<Cell> cells(const HomologySummary& h) {
    std::vector<Cell> out;
    for (const auto& [key, c] : h.cells) {
        std::vector<long> tor;
        for (const auto& t : c.torsion) tor.push_back(t.get_si());
        out.emplace_back(key[0], key[1], key[2], c.rank, tor);
    }
    return out;
}

std::vector<Cell> py_homology(const std::string& word, int strands, const std::string& ring, const std::string& q,
                              const std::string& pipeline, const std::string& geometry) {
    const auto w = parse_word(word, strands);
    const auto r = RingSpec::parse(ring, q);
    const bool mobius = geometry == "mobius";
    if (!mobius && geometry != "annulus") throw std::invalid_argument("geometry must be annulus or mobius");
    py::gil_scoped_release release;
    if (pipeline == "tqft") return cells(homology(mobius ? mobius_build_complex(w) : build_complex(w), r));
    if (pipeline == "hochschild") return cells(mobius ? qhh_mobius(w, r) : qhh_annular(w, r));
    throw std::invalid_argument("pipeline must be tqft or hochschild");
}

}  // namespace

PYBIND11_MODULE(_qakh, m) {
    m.doc() = "Quantum annular Khovanov homology";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<RingError>(m, "RingError", PyExc_ValueError);

    m.def("homology", &py_homology, py::arg("word"), py::arg("strands") = -1, py::arg("ring") = "Q",
          py::arg("q") = "1", py::arg("pipeline") = "tqft", py::arg("geometry") = "annulus",
          "Cells (i, j, k, rank, torsion) of the homology of the closure of a word.");

    m.def("torus_closed_form", [](int n, const std::string& ring, const std::string& q) {
        return cells(torus_closed_form(n, RingSpec::parse(ring, q)));
    }, py::arg("n"), py::arg("ring") = "Q", py::arg("q") = "1");

    m.def("normalize_word", [](const std::string& word, int strands) { return parse_word(word, strands).to_string(); },
          py::arg("word"), py::arg("strands") = -1);

    m.def("arc_algebra_dimension", [](int n) { return arc_algebra(n).dimension(); }, py::arg("n"));

    m.def("coinvariant_rank", [](int n, bool twisted, const std::string& ring, const std::string& q) {
        return coinv_q(CKBimodule(FlatTangle::identity(n)), twisted, RingSpec::parse(ring, q)).dim();
    }, py::arg("n"), py::arg("twisted") = false, py::arg("ring") = "Q", py::arg("q") = "1");

    m.def("selftest", [](bool quick, std::vector<int> only) {
        SelftestOptions opt;
        opt.quick = quick;
        opt.only = std::move(only);
        std::vector<CheckResult> res;
        {
            py::gil_scoped_release release;
            res = run_selftest(opt);
        }
        py::list out;
        for (const auto& r : res) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            out.append(d);
        }
        return out;
    }, py::arg("quick") = true, py::arg("only") = std::vector<int>{});

    m.def("cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "qakh");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run the command line with the given arguments; returns (exit code, stdout, stderr).");
}
