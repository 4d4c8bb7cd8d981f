"""Higher-order unification with oracles and fingerprint indexing."""

from ._core import (
    DeclError,
    HouError,
    ParseError,
    Problem,
    SolveResult,
    confirm,
    fingerprint,
    index_candidates,
    oracle_names,
    solve,
)

__all__ = [
    "DeclError",
    "HouError",
    "ParseError",
    "Problem",
    "SolveResult",
    "confirm",
    "fingerprint",
    "index_candidates",
    "oracle_names",
    "solve",
]
