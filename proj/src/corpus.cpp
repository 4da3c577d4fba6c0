/**
 * @file corpus.cpp
 * @brief Test corpus. Every level of every annular word has width <= 3, so all
 * seam rotations stay inside the range handled by the geometric pipeline.
 */
#include "qakh/corpus.hpp"

namespace qakh {

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> c = {
        {"T(2,1)", "torus 2 1"},
        {"T(2,2)", "torus 2 2"},
        {"T(2,3)", "torus 2 3"},
        {"T(2,4)", "torus 2 4"},
        {"T(2,5)", "torus 2 5"},
        {"T(2,6)", "torus 2 6"},
        {"pos-twist", "strands: 2 p1"},
        {"pos-trefoil", "strands: 2 p1 p1 p1"},
        {"r2-pair", "strands: 2 p1 n1"},
        {"mixed-3", "strands: 2 p1 p1 n1"},
        {"anti-2", "strands: 2 orient: +- p1 p1"},
        {"anti-4", "strands: 2 orient: +- n1 n1 n1 n1"},
        {"id-2", "strands: 2"},
        {"cap-cup-2", "strands: 2 orient: +- a1 u1"},
        {"twisted-cap-cup", "strands: 2 orient: +- p1 a1 u1 p1"},
        {"id-3", "strands: 3"},
        {"braid-pp", "strands: 3 p1 p2"},
        {"braid-pn", "strands: 3 p1 n2"},
        {"braid-nnn", "strands: 3 n1 n2 n1"},
        {"fig8-closure", "strands: 3 n1 p2 n1 p2"},
        {"braid-ppqq", "strands: 3 p1 p1 p2 p2"},
        {"braid-pqpq", "strands: 3 p1 p2 p1 p2"},
        {"braid-full-twist", "strands: 3 n1 n2 n1 n2 n1 n2"},
        {"braid-pppq", "strands: 3 p1 p1 p1 p2"},
        {"anti-braid", "strands: 3 orient: +-+ p1 p1 p2 p2"},
        {"cap-cup-3", "strands: 3 orient: ++- a2 u2 p1 p1"},
        {"twisted-3", "strands: 3 orient: +-- n2 p1 p1 n2"},
        {"kink-pos", "strands: 1 u2 p1 a2"},
        {"kink-neg", "strands: 1 u2 n1 a2"},
        {"far-kink", "strands: 1 u2 p2 a2"},
        {"hopf-1", "strands: 1 u2 p1 p1 a2"},
        {"id-1", "strands: 1"},
        {"left-kink", "strands: 1 u1 p2 a1"},
        {"clasp-1", "strands: 1 u2 p1 n2 p1 a2"},
    };
    return c;
}

const std::vector<CorpusEntry>& mobius_corpus() {
    static const std::vector<CorpusEntry> c = {
        {"M-id", "strands: 2"},
        {"M-T(2,1)", "torus 2 1"},
        {"M-T(2,2)", "torus 2 2"},
        {"M-T(2,3)", "torus 2 3"},
        {"M-T(2,4)", "torus 2 4"},
        {"M-p", "strands: 2 p1"},
        {"M-pp", "strands: 2 p1 p1"},
        {"M-pn", "strands: 2 p1 n1"},
        {"M-pppn", "strands: 2 p1 p1 p1 n1"},
        {"M-anti-1", "strands: 2 orient: +- p1"},
        {"M-anti-3", "strands: 2 orient: +- n1 n1 n1"},
        {"M-cap-cup", "strands: 2 orient: +- a1 u1"},
    };
    return c;
}

const std::vector<MovePair>& move_pairs() {
    static const std::vector<MovePair> m = {
        {"R1+", "strands: 1", "strands: 1 u2 p1 a2", 0},
        {"R1-", "strands: 1", "strands: 1 u2 n1 a2", 0},
        {"R1 left", "strands: 1", "strands: 1 u1 p2 a1", 0},
        {"R1 on far circle", "strands: 1 u2 a2", "strands: 1 u2 p2 a2", 0},
        {"R1 after a cap", "strands: 3 orient: ++- a2 u2 p1 p1", "strands: 3 orient: ++- a2 u2 p1 a2 u2 p1 p1", 0},
        {"R2", "strands: 2", "strands: 2 p1 n1", 0},
        {"R2 twisted", "strands: 2 p1", "strands: 2 p1 n1 p1", 0},
        {"R2 braid", "strands: 3 p1", "strands: 3 p1 p2 n2", 0},
        {"R2 anti", "strands: 2 orient: +-", "strands: 2 orient: +- n1 p1", 0},
        {"far circle", "strands: 1", "strands: 1 u2 a2", 1},
        {"far circle, kink", "strands: 1 u2 p1 a2", "strands: 1 u2 p1 a2 u2 a2", 1},
        {"far circle, 3 strands", "strands: 3 orient: ++- a2 u2 p1 p1", "strands: 3 orient: ++- a2 u2 a2 u2 p1 p1", 1},
    };
    return m;
}

}  // namespace qakh
