"""Core value types shared by the mutation operators."""

from __future__ import annotations

import ast
import enum
from dataclasses import dataclass, field


class Category(enum.Enum):
    LEXICAL = "lexical"
    SYNTACTIC = "syntactic"
    LOGICAL = "logical"


class MutationOperator(enum.Enum):
    """The eleven mutation operators, grouped into three categories."""

    RANDOM_RENAME = "random"
    SEQUENTIAL_RENAME = "sequential"
    LITERAL_FORMAT = "literal_format"
    FOR_TO_WHILE = "for_to_while"
    FOR_TO_ENUMERATE = "for_to_enumerate"
    DEMORGAN = "demorgan"
    BOOLEAN_LITERAL = "boolean_literal"
    COMMUTATIVE_REORDER = "commutative_reorder"
    CONSTANT_UNFOLD = "constant_unfold"
    CONSTANT_UNFOLD_ADD = "constant_unfold_add"
    CONSTANT_UNFOLD_MULT = "constant_unfold_mult"

    @property
    def category(self) -> Category:
        if self in (
            MutationOperator.RANDOM_RENAME,
            MutationOperator.SEQUENTIAL_RENAME,
            MutationOperator.LITERAL_FORMAT,
        ):
            return Category.LEXICAL
        if self in (MutationOperator.FOR_TO_WHILE, MutationOperator.FOR_TO_ENUMERATE):
            return Category.SYNTACTIC
        return Category.LOGICAL

    @classmethod
    def from_name(cls, name: str) -> "MutationOperator":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown mutation operator: {name!r}") from None


@dataclass(frozen=True)
class SubjectProgram:
    """A parseable unit of subject source with an optional entry point."""

    source: str
    entry_point: str | None = None
    origin_task_id: str | None = None

    def tree(self) -> ast.Module:
        return ast.parse(self.source)


class OutcomeStatus(enum.Enum):
    APPLIED = "applied"
    NOT_APPLICABLE = "not_applicable"


@dataclass
class MutationOutcome:
    """Result of applying one operator (or an ordered composition)."""

    status: OutcomeStatus
    mutated_source: str | None = None
    operator_trace: list[tuple[str, int]] = field(default_factory=list)
    reason: str | None = None
    entry_point: str | None = None

    @property
    def applied(self) -> bool:
        return self.status is OutcomeStatus.APPLIED
