"""Semantic-preserving mutation engine for Python subject programs."""

from metamut.mutation.types import (
    Category,
    MutationOperator,
    MutationOutcome,
    OutcomeStatus,
    SubjectProgram,
)
from metamut.mutation.engine import (
    EquivalenceReport,
    applicable,
    compose,
    count_sites,
    mutate,
    normalize,
    verify_equivalence,
)

__all__ = [
    "Category",
    "EquivalenceReport",
    "MutationOperator",
    "MutationOutcome",
    "OutcomeStatus",
    "SubjectProgram",
    "applicable",
    "compose",
    "count_sites",
    "mutate",
    "normalize",
    "verify_equivalence",
]
