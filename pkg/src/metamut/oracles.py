"""Correctness and consistency oracles plus inconsistency distance.

The correctness oracle grades one model answer against a task's ground
truth (Correct / Incorrect / Invalid).  The consistency oracle compares
the verdicts for an (original, mutated) pair, classifies any divergence,
and attributes it directionally.  Distance measures how many individual
tests flipped pass/fail between the pair's generated programs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from metamut.executor import InProcessExecutor, TestReport, TestStatus, split_assertions
from metamut.ingest import Task, TaskType
from metamut.llm import Extracted, ExtractionKind
from metamut.values import NotALiteral, parse_literal, safe_equal


class CorrectnessStatus(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    INVALID = "invalid"


@dataclass
class CorrectnessVerdict:
    status: CorrectnessStatus
    passed_set: frozenset[int] | None = None  # code generation only
    test_count: int | None = None
    answer_repr: str | None = None
    detail: str | None = None


class Direction(enum.Enum):
    NONE = "none"
    OG = "og"
    MUT = "mut"
    BOTH = "both"

    def flipped(self) -> "Direction":
        if self is Direction.OG:
            return Direction.MUT
        if self is Direction.MUT:
            return Direction.OG
        return self


class ConsistencyKind(enum.Enum):
    CONSISTENT = "consistent"
    CORRECTNESS_BASED = "correctness_based"
    INCORRECTNESS_BASED = "incorrectness_based"
    INVALIDITY_BASED = "invalidity_based"


@dataclass
class ConsistencyVerdict:
    kind: ConsistencyKind
    incorrect_direction: Direction = Direction.NONE
    invalid_direction: Direction = Direction.NONE

    @property
    def inconsistent(self) -> bool:
        return self.kind is not ConsistencyKind.CONSISTENT


# --------------------------------------------------------------------------
# Correctness oracle
# --------------------------------------------------------------------------


def _invalid(detail: str) -> CorrectnessVerdict:
    return CorrectnessVerdict(status=CorrectnessStatus.INVALID, detail=detail)


def judge_correctness(
    task: Task,
    extracted: Extracted,
    executor: InProcessExecutor | None = None,
    code_override_entry: str | None = None,
) -> CorrectnessVerdict:
    """Grade one extracted answer against the task's ground truth.

    For code generation the generated program runs against the task's
    split test suite; a suite that only times out is graded Invalid (the
    answer never finished inside the time budget).
    """
    if extracted.is_invalid or extracted.value is None:
        return _invalid("no valid answer extracted")

    if task.task_type is TaskType.CODE_GENERATION:
        executor = executor or InProcessExecutor()
        units = split_assertions(task.test or "")
        report = executor.run_tests(
            extracted.value, units, code_override_entry or task.entry_point
        )
        if report.results and all(
            r.status is TestStatus.TIMEOUT for r in report.results
        ):
            return _invalid("all tests timed out")
        passed = frozenset(report.passed_indices)
        status = (
            CorrectnessStatus.CORRECT
            if report.all_passed
            else CorrectnessStatus.INCORRECT
        )
        return CorrectnessVerdict(
            status=status,
            passed_set=passed,
            test_count=len(report.results),
            detail=f"{len(passed)}/{len(report.results)} tests passed",
        )

    if task.task_type is TaskType.MCQ:
        answer = extracted.value.strip().upper()
        status = (
            CorrectnessStatus.CORRECT
            if answer == (task.answer or "").strip().upper()
            else CorrectnessStatus.INCORRECT
        )
        return CorrectnessVerdict(status=status, answer_repr=answer)

    if task.task_type is TaskType.INPUT_PREDICTION:
        answer = extracted.value.strip()
        expected = (task.canonical_answer() or "True").strip()
        status = (
            CorrectnessStatus.CORRECT
            if answer == expected
            else CorrectnessStatus.INCORRECT
        )
        return CorrectnessVerdict(status=status, answer_repr=answer)

    # Output prediction: structural literal comparison.
    try:
        value = parse_literal(extracted.value)
    except NotALiteral:
        return _invalid("answer is not a literal")
    try:
        expected_value = parse_literal(task.canonical_answer() or "")
    except NotALiteral:
        return _invalid("task has no literal ground truth")
    status = (
        CorrectnessStatus.CORRECT
        if safe_equal(value, expected_value)
        else CorrectnessStatus.INCORRECT
    )
    return CorrectnessVerdict(status=status, answer_repr=repr(value))


# --------------------------------------------------------------------------
# Consistency oracle
# --------------------------------------------------------------------------


def _same_incorrect_behavior(og: CorrectnessVerdict, mut: CorrectnessVerdict) -> bool:
    if og.passed_set is not None and mut.passed_set is not None:
        return og.passed_set == mut.passed_set
    return og.answer_repr == mut.answer_repr


def judge_consistency(
    og: CorrectnessVerdict, mut: CorrectnessVerdict
) -> ConsistencyVerdict:
    """Classify an (original, mutated) verdict pair.

    Total over all nine status pairs; (Incorrect, Incorrect) splits on
    whether both answers misbehave identically (same passed test set /
    same extracted answer).
    """
    C, I, V = (
        CorrectnessStatus.CORRECT,
        CorrectnessStatus.INCORRECT,
        CorrectnessStatus.INVALID,
    )
    a, b = og.status, mut.status

    if a is V or b is V:
        if a is V and b is V:
            return ConsistencyVerdict(
                ConsistencyKind.CONSISTENT, invalid_direction=Direction.BOTH
            )
        invalid_dir = Direction.OG if a is V else Direction.MUT
        incorrect_dir = Direction.NONE
        if a is I:
            incorrect_dir = Direction.OG
        elif b is I:
            incorrect_dir = Direction.MUT
        return ConsistencyVerdict(
            ConsistencyKind.INVALIDITY_BASED,
            incorrect_direction=incorrect_dir,
            invalid_direction=invalid_dir,
        )

    if a is C and b is C:
        return ConsistencyVerdict(ConsistencyKind.CONSISTENT)
    if a is C and b is I:
        return ConsistencyVerdict(
            ConsistencyKind.CORRECTNESS_BASED, incorrect_direction=Direction.MUT
        )
    if a is I and b is C:
        return ConsistencyVerdict(
            ConsistencyKind.CORRECTNESS_BASED, incorrect_direction=Direction.OG
        )
    # Both incorrect: consistent only when they misbehave identically.
    if _same_incorrect_behavior(og, mut):
        return ConsistencyVerdict(
            ConsistencyKind.CONSISTENT, incorrect_direction=Direction.BOTH
        )
    return ConsistencyVerdict(
        ConsistencyKind.INCORRECTNESS_BASED, incorrect_direction=Direction.BOTH
    )


# --------------------------------------------------------------------------
# Inconsistency distance
# --------------------------------------------------------------------------


class MismatchError(ValueError):
    """Reports cover differently sized test suites."""


@dataclass
class DistanceRecord:
    per_pair_distance: Fraction
    test_count: int


def inconsistency_distance(
    og_report: TestReport, mut_report: TestReport
) -> DistanceRecord:
    """Fraction of tests whose pass status flips between the pair."""
    n = len(og_report.results)
    if n != len(mut_report.results):
        raise MismatchError(
            f"test counts differ: {n} vs {len(mut_report.results)}"
        )
    if n == 0:
        raise MismatchError("empty test suite")
    flipped = sum(
        1
        for og_result, mut_result in zip(og_report.results, mut_report.results)
        if og_result.passed != mut_result.passed
    )
    return DistanceRecord(per_pair_distance=Fraction(flipped, n), test_count=n)


def distance_from_sets(
    og_passed: frozenset[int], mut_passed: frozenset[int], test_count: int
) -> DistanceRecord:
    """Distance from passed-index sets (symmetric difference / count)."""
    if test_count < 1:
        raise MismatchError("test_count must be >= 1")
    flipped = len(og_passed ^ mut_passed)
    return DistanceRecord(
        per_pair_distance=Fraction(flipped, test_count), test_count=test_count
    )
