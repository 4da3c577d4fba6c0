/**
 * @file selftest.hpp
 * @brief The acceptance suite: twelve numbered checks, each a pass / fail
 * verdict with a one-line detail.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qakh/linalg.hpp"

namespace qakh {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct SelftestOptions {
    bool quick = false;     // smaller sample sizes, same checks
    std::vector<int> only;  // empty: all
};

/// Runs the checks in order; `progress` (if set) sees each result as it finishes.
std::vector<CheckResult> run_selftest(const SelftestOptions& opt,
                                      const std::function<void(const CheckResult&)>& progress = {});

/// Individual checks (exceptions are caught by run_selftest).
CheckResult check_torus_table();
CheckResult check_torus_closed_form(int max_n);
CheckResult check_dual_pipeline(bool quick);
CheckResult check_classical_limit();
CheckResult check_invariance(bool quick);
CheckResult check_arc_fixtures(int random_triples);
CheckResult check_hochschild();
CheckResult check_duality();
CheckResult check_quantum_group();
CheckResult check_viro();
CheckResult check_mobius();
CheckResult check_skein();

/**
 * Predicted homology of the closure of torus 2 n (n >= 1) over r: three classes
 * at (0, -n), one at (-n, -3n), and the classes that appear when q^2 = +-1.
 */
HomologySummary torus_closed_form(int n, const RingSpec& r);

}  // namespace qakh
