/**
 * @file classical.hpp
 * @brief Independent q = 1 oracles: the APS annular functor and the Mobius functor,
 * evaluated directly on closed resolutions with the classical merge/split tables.
 */
#pragma once

#include "qakh/linalg.hpp"
#include "qakh/tangle.hpp"

namespace qakh {

enum class CurveType { Trivial, Essential, Nonseparating };

/// Curve types of the closed resolution at xi, indexed by component id.
std::vector<CurveType> classify_curves(const TangleWord& w, const std::vector<int>& xi, Closure closure);

/// Classical complexes with integer entries and the same global shifts as build_complex.
GradedChainComplex classical_aps_complex(const TangleWord& w);
GradedChainComplex classical_mobius_complex(const TangleWord& w);

}  // namespace qakh
