/**
 * @file corpus.hpp
 * @brief Fixed test corpus of closable words plus Reidemeister-related pairs.
 */
#pragma once

#include <string>
#include <vector>

#include "qakh/tangle.hpp"

namespace qakh {

struct CorpusEntry {
    std::string name;
    std::string text;
    TangleWord word() const { return parse_word(text); }
};

/// Annular words: at most 6 crossings and 3 strands.
const std::vector<CorpusEntry>& corpus();
/// 2-strand words whose Mobius closure is oriented (at most 4 crossings).
const std::vector<CorpusEntry>& mobius_corpus();

/// Pairs related by one R1 or R2 move away from the seam, or by a far trivial circle.
struct MovePair {
    std::string move;
    std::string before, after;
    int delooping_shift = 0;  // far circle: H(after) = H(before) (x) (q + q^-1)
};
const std::vector<MovePair>& move_pairs();

}  // namespace qakh
