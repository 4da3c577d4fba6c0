/**
 * @file cli.hpp
 * @brief Command-line driver: job configuration, subcommands and exit codes.
 */
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,   // mismatch, failed check, unsupported request
    kExitUsage = 2,
    kExitParse = 3,
    kExitRing = 4,
    kExitResource = 5,
    kExitInternal = 6,
};

/// A request that would exceed a size ceiling; the message carries the estimate.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct JobConfig {
    std::string subcommand = "homology";  // homology, arc-algebra, action, selftest
    std::string word;                     // inline word text
    std::string file;                     // or a file holding it
    int strands = -1;
    std::string ring = "Q";
    std::string q = "1";
    std::string pipeline = "both";    // tqft, hochschild, both
    std::string geometry = "annulus";  // annulus, mobius
    std::string output = "table";      // table, json, csv
    long max_generators = 1L << 22;

    // arc-algebra
    int n = 2;
    int truncation = 0;
    bool twisted = false;

    // action
    std::string tangle_file, braid_file;
    int twists = 0;

    // selftest
    bool quick = false;
    std::vector<int> only;

    nlohmann::json to_json() const;
};

/// Upper bound on the number of generators of the bracket complex of w.
long estimate_generators(const TangleWord& w);

/// Runs one job; diagnostics go to err as one line.
int run_job(const JobConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv into a JobConfig and runs it.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qakh
