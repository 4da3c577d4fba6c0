/**
 * @file acceptance.cpp
 * @brief Runs the twelve acceptance checks, one PASS/FAIL line each.
 */
#include <cstdio>

#include "qakh/selftest.hpp"

int main() {
    using namespace qakh;
    const auto results = run_selftest({}, [](const CheckResult& r) {
        std::printf("%s %d %s [%.2fs] %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
    });
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed ? 1 : 0;
}
