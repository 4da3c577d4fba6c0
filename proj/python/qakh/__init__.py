"""Quantum annular Khovanov homology: Python front end of the C++ library."""

from ._qakh import (
    ParseError,
    RingError,
    arc_algebra_dimension,
    cli,
    coinvariant_rank,
    homology,
    normalize_word,
    selftest,
    torus_closed_form,
)

__all__ = [
    "ParseError",
    "RingError",
    "arc_algebra_dimension",
    "cli",
    "coinvariant_rank",
    "homology",
    "normalize_word",
    "selftest",
    "torus_closed_form",
    "poincare",
]


def poincare(word, **kwargs):
    """Homology as a dict (i, j, k) -> rank."""
    return {(i, j, k): rank for i, j, k, rank, _ in homology(word, **kwargs)}
