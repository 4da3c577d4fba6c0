/**
 * @file test_cli.cpp
 * @brief Command-line driver: outputs, verdicts and exit codes.
 */
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qakh/cli.hpp"
#include "qakh/linalg.hpp"

using namespace qakh;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "qakh");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    const std::string path = "qakh_test_" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("homology of torus 2 5 over F5 matches") {
    const auto r = run({"homology", "--word", "torus 2 5", "--ring", "F5", "--q", "2", "--output", "json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"] == "MATCH");
    const auto h = HomologySummary::from_json(j["homology"]);
    CHECK(h.total_rank() == 8);
    CHECK(h.rank(0, -5, 2) == 1);
    CHECK(h.rank(-3, -9, 0) == 1);
    CHECK(j["config"]["pipeline"] == "both");
}

TEST_CASE("empty word") {
    const auto r = run({"homology", "--word", "", "--output", "json"});
    CHECK(r.code == kExitOk);
    const auto h = HomologySummary::from_json(nlohmann::json::parse(r.out)["homology"]);
    CHECK(h.total_rank() == 2);
    CHECK(h.rank(0, 0, 1) == 1);
    CHECK(h.rank(0, 0, -1) == 1);
}

TEST_CASE("output is byte stable") {
    for (const std::string fmt : {"table", "json", "csv"}) {
        const auto a = run({"homology", "--word", "strands: 3 p1 p2 p1 p2", "--output", fmt});
        const auto b = run({"homology", "--word", "strands: 3 p1 p2 p1 p2", "--output", fmt});
        CHECK(a.code == kExitOk);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("json round trip") {
    const auto r = run({"homology", "--word", "p1 p1 p1", "--ring", "F7", "--q", "3", "--output", "json"});
    const auto j = nlohmann::json::parse(r.out);
    for (const auto& cell : j["homology"])
        for (const char* key : {"i", "j", "k", "rank", "torsion"}) CHECK(cell.contains(key));
    const auto h = HomologySummary::from_json(j["homology"]);
    CHECK(h.to_json() == j["homology"]);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"homology"}).code == kExitUsage);
    CHECK(run({"homology", "--word", "p1", "--output", "xml"}).code == kExitUsage);
    CHECK(run({"homology", "--word", "p1 z3"}).code == kExitParse);
    CHECK(run({"homology", "--word", "u1", "--strands", "1"}).code == kExitParse);
    CHECK(run({"homology", "--word", "p1", "--ring", "F6"}).code == kExitRing);
    CHECK(run({"homology", "--word", "p1", "--ring", "Q", "--q", "0"}).code == kExitRing);
    CHECK(run({"homology", "--word", "p1", "--ring", "Z"}).code == kExitRing);
    CHECK(run({"homology", "--word", "p1", "--ring", "Z", "--pipeline", "tqft"}).code == kExitOk);
    const auto big = run({"homology", "--word", "torus 2 8", "--max-generators", "100"});
    CHECK(big.code == kExitResource);
    CHECK(big.err.find("estimated") != std::string::npos);
    CHECK(run({"arc-algebra", "--n", "9"}).code == kExitResource);
}

TEST_CASE("mobius geometry") {
    const auto r = run({"homology", "--word", "p1 p1", "--geometry", "mobius", "--ring", "F5", "--q", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("verdict: MATCH") != std::string::npos);
}

TEST_CASE("word from a file") {
    const auto path = temp_file("word.txt", "strands: 2\np1 p1\n");
    const auto r = run({"homology", "--file", path, "--output", "csv"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("i,j,k,rank,torsion", 0) == 0);
    std::remove(path.c_str());
}

TEST_CASE("arc-algebra subcommand") {
    const auto r = run({"arc-algebra", "--n", "2", "--truncation", "2", "--ring", "F5", "--q", "2", "--output", "json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["dimension"] == 7);
    CHECK(j["coinvariants"] == 4);
    CHECK(j["by_weight"]["0"] == 5);
}

TEST_CASE("action subcommand") {
    const auto t = temp_file("t.txt", "");
    const auto tp = temp_file("tp.txt", "strands: 2\np1\n");
    const auto r = run({"action", t, tp, "--output", "json"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["skein"]["holds"] == true);
    CHECK(j["commutes_with_uq"] == true);
    CHECK(j["dimension"] == 4);
    CHECK(run({"action", t, tp, "--ring", "F5", "--q", "2"}).code == kExitRing);
    std::remove(t.c_str());
    std::remove(tp.c_str());
}

TEST_CASE("selftest subset") {
    const auto r = run({"selftest", "--only", "6", "8"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("PASS 6") != std::string::npos);
    CHECK(r.out.find("PASS 8") != std::string::npos);
}
