"""Operator dispatch: applicability, mutation, composition, verification.

``mutate`` is deterministic for a given (operator, program, seed) and
either applies the operator at every eligible site or reports
NOT_APPLICABLE with a reason.  An applied outcome always differs
textually from the (quote-preserving) normalization of its input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from metamut.executor import InProcessExecutor, TestStatus
from metamut.mutation import logic, loops, rename, strings
from metamut.mutation.types import (
    MutationOperator,
    MutationOutcome,
    OutcomeStatus,
    SubjectProgram,
)
from metamut.rendering import parse, render
from metamut.values import safe_equal

SEED_MODULUS = 2**64

_NA_REASONS = {
    MutationOperator.RANDOM_RENAME: "no renameable identifiers",
    MutationOperator.SEQUENTIAL_RENAME: "no renameable identifiers",
    MutationOperator.LITERAL_FORMAT: "no flippable string literals",
    MutationOperator.FOR_TO_WHILE: "no convertible for loops",
    MutationOperator.FOR_TO_ENUMERATE: "no convertible for loops",
    MutationOperator.DEMORGAN: "no rewritable boolean chains",
    MutationOperator.BOOLEAN_LITERAL: "no boolean literals",
    MutationOperator.COMMUTATIVE_REORDER: "no commutative operand pairs",
    MutationOperator.CONSTANT_UNFOLD: "no unfoldable integer literals",
    MutationOperator.CONSTANT_UNFOLD_ADD: "no unfoldable integer literals",
    MutationOperator.CONSTANT_UNFOLD_MULT: "no unfoldable integer literals",
}


def _transform(
    operator: MutationOperator, program: SubjectProgram, seed: int
) -> tuple[str, int, str | None]:
    """Apply one operator, returning (source, site count, new entry point)."""
    tree = parse(program.source)
    strings.annotate_quote_styles(tree, program.source)
    entry = program.entry_point
    func_map: dict[str, str] = {}

    if operator is MutationOperator.RANDOM_RENAME:
        rng = random.Random(seed % SEED_MODULUS)
        tree, sites, func_map = rename.rename_random(tree, rng, entry)
    elif operator is MutationOperator.SEQUENTIAL_RENAME:
        tree, sites, func_map = rename.rename_sequential(tree, entry)
    elif operator is MutationOperator.LITERAL_FORMAT:
        tree, sites = strings.flip_string_quotes(tree, program.source)
    elif operator is MutationOperator.FOR_TO_WHILE:
        tree, sites = loops.for_to_while(tree)
    elif operator is MutationOperator.FOR_TO_ENUMERATE:
        tree, sites = loops.for_to_enumerate(tree)
    elif operator is MutationOperator.DEMORGAN:
        tree, sites = logic.demorgan(tree)
    elif operator is MutationOperator.BOOLEAN_LITERAL:
        tree, sites = logic.boolean_literal(tree)
    elif operator is MutationOperator.COMMUTATIVE_REORDER:
        tree, sites = logic.commutative_reorder(tree)
    elif operator is MutationOperator.CONSTANT_UNFOLD:
        tree, sites = logic.constant_unfold(tree)
    elif operator is MutationOperator.CONSTANT_UNFOLD_ADD:
        tree, sites = logic.constant_unfold_add(tree)
    elif operator is MutationOperator.CONSTANT_UNFOLD_MULT:
        tree, sites = logic.constant_unfold_mult(tree)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled operator: {operator}")

    new_entry = func_map.get(entry, entry) if entry else entry
    return render(tree), sites, new_entry


def normalize(program: SubjectProgram) -> str:
    """Render the program unchanged (formatting normalized, quotes kept)."""
    tree = parse(program.source)
    strings.annotate_quote_styles(tree, program.source)
    return render(tree)


def count_sites(operator: MutationOperator, program: SubjectProgram) -> int:
    """Count the sites the operator would rewrite in this program."""
    _, sites, _ = _transform(operator, program, seed=0)
    return sites


def applicable(operator: MutationOperator, program: SubjectProgram) -> bool:
    """True iff the operator has at least one legal rewrite site."""
    return count_sites(operator, program) > 0


def mutate(
    program: SubjectProgram, operator: MutationOperator, seed: int = 0
) -> MutationOutcome:
    """Apply one operator at every eligible site.

    Returns NOT_APPLICABLE when there are no sites or when rewriting
    every site still reproduces the normalized input text (e.g. a
    program already in sequential-rename form).
    """
    mutated, sites, new_entry = _transform(operator, program, seed)
    if sites == 0:
        return MutationOutcome(
            status=OutcomeStatus.NOT_APPLICABLE,
            reason=_NA_REASONS[operator],
            entry_point=program.entry_point,
        )
    if mutated == normalize(program):
        return MutationOutcome(
            status=OutcomeStatus.NOT_APPLICABLE,
            reason="mutation produced no textual change",
            entry_point=program.entry_point,
        )
    return MutationOutcome(
        status=OutcomeStatus.APPLIED,
        mutated_source=mutated,
        operator_trace=[(operator.value, sites)],
        entry_point=new_entry,
    )


def compose(
    program: SubjectProgram, operators: Sequence[MutationOperator], seed: int = 0
) -> MutationOutcome:
    """Apply operators left to right; stage k derives its seed as (seed + k).

    The composition is applied only when every stage applies; otherwise
    the outcome names the first failing stage.
    """
    current = program
    trace: list[tuple[str, int]] = []
    entry = program.entry_point
    for stage, operator in enumerate(operators):
        outcome = mutate(current, operator, (seed + stage) % SEED_MODULUS)
        if not outcome.applied:
            return MutationOutcome(
                status=OutcomeStatus.NOT_APPLICABLE,
                reason=(
                    f"stage {stage} ({operator.value}) not applicable: "
                    f"{outcome.reason}"
                ),
                entry_point=program.entry_point,
            )
        trace.extend(outcome.operator_trace)
        entry = outcome.entry_point
        current = SubjectProgram(
            source=outcome.mutated_source,
            entry_point=entry,
            origin_task_id=program.origin_task_id,
        )
    if not trace:
        return MutationOutcome(
            status=OutcomeStatus.NOT_APPLICABLE,
            reason="empty operator list",
            entry_point=program.entry_point,
        )
    return MutationOutcome(
        status=OutcomeStatus.APPLIED,
        mutated_source=current.source,
        operator_trace=trace,
        entry_point=entry,
    )


@dataclass
class EquivalenceReport:
    """Differential-execution verdict for an (original, mutant) pair."""

    equivalent: bool
    checked: int = 0
    mismatches: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equivalent


def verify_equivalence(
    program: SubjectProgram,
    outcome: MutationOutcome,
    inputs: Sequence[str] = (),
    tests: Sequence[str] = (),
    executor: InProcessExecutor | None = None,
) -> EquivalenceReport:
    """Check behavioral equivalence of a mutant by differential execution.

    ``inputs`` are argument-list texts applied to the entry point of
    both versions; ``tests`` are test units run against both versions.
    Two runs agree when they pass with structurally equal values, fail
    the same way, or both time out.
    """
    if not outcome.applied or outcome.mutated_source is None:
        raise ValueError("cannot verify a NOT_APPLICABLE outcome")
    executor = executor or InProcessExecutor()
    mismatches: list[str] = []
    checked = 0

    entry = program.entry_point
    mutated_entry = outcome.entry_point or entry
    for args_source in inputs:
        if entry is None:
            raise ValueError("input-based verification requires an entry point")
        checked += 1
        before = executor.call_entry(program.source, entry, args_source)
        after = executor.call_entry(outcome.mutated_source, mutated_entry, args_source)
        if before.status is not after.status:
            mismatches.append(
                f"input ({args_source}): {before.status.value} vs {after.status.value}"
            )
        elif before.status is TestStatus.PASS and not safe_equal(
            before.value, after.value
        ):
            mismatches.append(
                f"input ({args_source}): {before.value!r} vs {after.value!r}"
            )

    if tests:
        before_report = executor.run_tests(program.source, tests, entry)
        after_report = executor.run_tests(outcome.mutated_source, tests, mutated_entry)
        for i, (b, a) in enumerate(zip(before_report.results, after_report.results)):
            checked += 1
            if b.status is not a.status:
                mismatches.append(f"test {i}: {b.status.value} vs {a.status.value}")

    return EquivalenceReport(
        equivalent=not mismatches, checked=checked, mismatches=mismatches
    )
