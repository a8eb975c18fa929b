"""End-to-end acceptance gate.

Each test exercises one headline guarantee of the toolkit and prints a
single pass/fail line (written straight to the terminal so the summary
survives pytest's capture).
"""

from __future__ import annotations

import itertools
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from metamut.executor import split_assertions
from metamut.ingest import TaskType
from metamut.llm import ModelSpec
from metamut.metrics import (
    PairRecord,
    aggregate,
    confidence_filter,
    render_percent,
)
from metamut.mutation import (
    MutationOperator as Op,
    SubjectProgram,
    applicable,
    compose,
    count_sites,
    mutate,
    verify_equivalence,
)
from metamut.oracles import (
    ConsistencyKind,
    CorrectnessStatus,
    CorrectnessVerdict,
    Direction,
    distance_from_sets,
    judge_consistency,
)
from metamut.runner import RunConfig, run

from conftest import make_mock_script

C, I, V = (
    CorrectnessStatus.CORRECT,
    CorrectnessStatus.INCORRECT,
    CorrectnessStatus.INVALID,
)


_CAPTURE_MANAGER = None


@pytest.fixture(autouse=True)
def _find_capture_manager(request):
    global _CAPTURE_MANAGER
    _CAPTURE_MANAGER = request.config.pluginmanager.getplugin("capturemanager")
    yield


def check(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    if _CAPTURE_MANAGER is not None:
        with _CAPTURE_MANAGER.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, flush=True)
    assert ok, line


def _verification_material(task):
    if task.task_type is TaskType.CODE_GENERATION:
        return [], split_assertions(task.test or "")
    return ([task.input] if task.input is not None else []), []


# --------------------------------------------------------------------------
# 1. Semantic preservation across the whole corpus
# --------------------------------------------------------------------------


def test_semantic_preservation_over_corpus(corpus, executor) -> None:
    start = time.monotonic()
    applied = 0
    rejected_reorder = 0
    failures: list[str] = []
    for task in corpus.tasks:
        program = task.subject_program()
        inputs, tests = _verification_material(task)
        for op in Op:
            outcome = mutate(program, op, seed=42)
            if not outcome.applied:
                continue
            applied += 1
            report = verify_equivalence(
                program, outcome, inputs=inputs, tests=tests, executor=executor
            )
            if not report.equivalent:
                if op is Op.COMMUTATIVE_REORDER:
                    rejected_reorder += 1
                else:
                    failures.append(f"{task.task_id}/{op.value}")
    sandbox_checked = _spot_check_against_sandbox(corpus, failures)
    elapsed = time.monotonic() - start
    ok = not failures and applied >= 50 and elapsed < 300
    check(
        "semantic preservation",
        ok,
        f"{applied} mutants equivalent over {len(corpus.tasks)} tasks in "
        f"{elapsed:.1f}s (reorder rejections: {rejected_reorder}, "
        f"isolated-runner spot checks: {sandbox_checked}, "
        f"other failures: {failures[:5]})",
    )


def _spot_check_against_sandbox(corpus, failures: list[str]) -> int:
    """Re-verify a few mutants in the isolated runner when it is installed."""
    try:
        from sandbox_runner import eval_output_equal, run_entry
    except ImportError:
        return 0
    checked = 0
    for task in corpus.tasks:
        if task.task_type is not TaskType.OUTPUT_PREDICTION or checked >= 5:
            continue
        program = task.subject_program()
        outcome = mutate(program, Op.SEQUENTIAL_RENAME, seed=42)
        if not outcome.applied:
            continue
        original = run_entry(program.source, program.entry_point, task.input, 5)
        mutated = run_entry(
            outcome.mutated_source, outcome.entry_point, task.input, 5
        )
        if original.get("status") != "Pass" or mutated.get("status") != "Pass":
            failures.append(f"{task.task_id}/isolated-runner: {original} vs {mutated}")
        elif not eval_output_equal(original["value"], mutated["value"]):
            failures.append(
                f"{task.task_id}/isolated-runner: "
                f"{original['value']} != {mutated['value']}"
            )
        checked += 1
    return checked


# --------------------------------------------------------------------------
# 2. Operator fidelity (golden transformations)
# --------------------------------------------------------------------------


def test_operator_fidelity_goldens() -> None:
    def src(text: str) -> SubjectProgram:
        return SubjectProgram(source=text, entry_point="f")

    goldens: list[tuple[str, bool]] = []

    out = mutate(src("def f(text):\n    return not text.isdecimal()\n"), Op.SEQUENTIAL_RENAME)
    goldens.append(
        (
            "sequential rename",
            out.mutated_source
            == "def generic_function1(var1):\n    return not var1.isdecimal()\n",
        )
    )

    out = mutate(src("def f():\n    new_name = ''\n    return new_name\n"), Op.LITERAL_FORMAT)
    goldens.append(("literal format", 'new_name = ""' in out.mutated_source))

    out = mutate(
        src(
            "def f(l):\n"
            "    out = []\n"
            "    for i in reversed(range(len(l))):\n"
            "        out.append(l[i])\n"
            "    return out\n"
        ),
        Op.FOR_TO_WHILE,
    )
    goldens.append(
        (
            "for-to-while",
            "new_reversed_var4 = range(len(l))[::-1]" in out.mutated_source
            and "while loop_var0 < length_var3:" in out.mutated_source,
        )
    )

    out = mutate(
        src(
            "def f(text):\n"
            "    result = ''\n"
            "    for c in text:\n"
            "        result += c\n"
            "    return result\n"
        ),
        Op.FOR_TO_ENUMERATE,
    )
    goldens.append(
        ("for-to-enumerate", "for loop_var0, c in enumerate(text):" in out.mutated_source)
    )

    out = mutate(
        src(
            "def f(array, j, target):\n"
            "    if array[j] > array[j - 1] and array[j] <= target:\n"
            "        return 1\n"
            "    return 0\n"
        ),
        Op.DEMORGAN,
    )
    goldens.append(
        (
            "demorgan and-to-or",
            "not (not array[j] > array[j - 1] or not array[j] <= target)"
            in out.mutated_source,
        )
    )

    out = mutate(
        src("def f(i, a, b):\n    if i % a == 0 or i % b == 0:\n        return 1\n    return 0\n"),
        Op.DEMORGAN,
    )
    goldens.append(
        (
            "demorgan or-to-and",
            "not (not i % a == 0 and (not i % b == 0))" in out.mutated_source,
        )
    )

    out = mutate(
        src("def f(n):\n    if n > 0:\n        return False\n    return True\n"),
        Op.BOOLEAN_LITERAL,
    )
    goldens.append(
        (
            "boolean literal",
            "return not True" in out.mutated_source
            and "return not False" in out.mutated_source,
        )
    )

    out = mutate(src("def f(text, start):\n    return text[start + 1:]\n"), Op.COMMUTATIVE_REORDER)
    goldens.append(("commutative reorder", "text[1 + start:]" in out.mutated_source))

    out = mutate(src("def f(lists):\n    return lists[1]\n"), Op.CONSTANT_UNFOLD_MULT)
    goldens.append(("constant unfold", "lists[1 * 1]" in out.mutated_source))

    failed = [name for name, ok in goldens if not ok]
    check(
        "operator fidelity",
        not failed,
        f"{len(goldens)} golden transformations (failed: {failed})",
    )


# --------------------------------------------------------------------------
# 3. De Morgan truth-table equivalence on random boolean expressions
# --------------------------------------------------------------------------


def _random_bool_expr(rng: random.Random, atoms: list[str], depth: int) -> str:
    if depth == 0 or (depth < 2 and rng.random() < 0.3):
        atom = rng.choice(atoms)
        return f"not {atom}" if rng.random() < 0.3 else atom
    left = _random_bool_expr(rng, atoms, depth - 1)
    right = _random_bool_expr(rng, atoms, depth - 1)
    joined = f"({left}) {rng.choice(['and', 'or'])} ({right})"
    return f"not ({joined})" if rng.random() < 0.2 else joined


def test_demorgan_truth_tables() -> None:
    rng = random.Random(12345)
    checked = 0
    mismatches = 0
    while checked < 1000:
        n_atoms = rng.randint(2, 6)
        atoms = [f"p{i}" for i in range(n_atoms)]
        expr = _random_bool_expr(rng, atoms, rng.randint(1, 3))
        source = (
            f"def f({', '.join(atoms)}):\n"
            f"    if {expr}:\n"
            f"        return True\n"
            f"    return False\n"
        )
        program = SubjectProgram(source=source, entry_point="f")
        if count_sites(Op.DEMORGAN, program) == 0:
            continue
        outcome = mutate(program, Op.DEMORGAN)
        original_ns: dict = {}
        mutated_ns: dict = {}
        exec(source, original_ns)
        exec(outcome.mutated_source, mutated_ns)
        for values in itertools.product((False, True), repeat=n_atoms):
            if original_ns["f"](*values) != mutated_ns["f"](*values):
                mismatches += 1
                break
        checked += 1
    check(
        "boolean rewrite truth tables",
        mismatches == 0,
        f"1000 random expressions (<=6 atoms), {mismatches} mismatches",
    )


# --------------------------------------------------------------------------
# 4. Consistency oracle totality (11 cells)
# --------------------------------------------------------------------------


def test_oracle_totality() -> None:
    def verdict(status, answer):
        return CorrectnessVerdict(status=status, answer_repr=answer)

    CONS = ConsistencyKind.CONSISTENT
    CORR = ConsistencyKind.CORRECTNESS_BASED
    INC = ConsistencyKind.INCORRECTNESS_BASED
    INV = ConsistencyKind.INVALIDITY_BASED
    N, OG, MUT, BOTH = Direction.NONE, Direction.OG, Direction.MUT, Direction.BOTH

    # (og status, mut status, answers equal) -> (kind, incorrect dir, invalid dir)
    cells = [
        ((C, C, True), (CONS, N, N)),
        ((C, I, False), (CORR, MUT, N)),
        ((I, C, False), (CORR, OG, N)),
        ((I, I, True), (CONS, BOTH, N)),
        ((I, I, False), (INC, BOTH, N)),
        ((C, V, False), (INV, N, MUT)),
        ((V, C, False), (INV, N, OG)),
        ((I, V, False), (INV, OG, MUT)),
        ((V, I, False), (INV, MUT, OG)),
        ((V, V, True), (CONS, N, BOTH)),
        ((V, V, False), (CONS, N, BOTH)),
    ]
    failed = []
    for (og, mut, same), (kind, inc_dir, inv_dir) in cells:
        result = judge_consistency(
            verdict(og, "x"), verdict(mut, "x" if same else "y")
        )
        if (result.kind, result.incorrect_direction, result.invalid_direction) != (
            kind,
            inc_dir,
            inv_dir,
        ):
            failed.append((og.value, mut.value, same))
    check("oracle totality", not failed, f"11/11 cells classified (failed: {failed})")


# --------------------------------------------------------------------------
# 5. Rate and accuracy over a large synthetic record set
# --------------------------------------------------------------------------


def _synthetic(n: int, mut: CorrectnessStatus, kind: ConsistencyKind) -> list[PairRecord]:
    return [
        PairRecord(
            task_id=f"{kind.value}_{mut.value}_{i}",
            dataset="synthetic",
            task_type="output_prediction",
            model="m",
            operators=("demorgan",),
            category="logical",
            og_status=C,
            mut_status=mut,
            kind=kind,
        )
        for i in range(n)
    ]


def test_rate_and_accuracy_rendering() -> None:
    records = (
        _synthetic(102092, C, ConsistencyKind.CONSISTENT)
        + _synthetic(23919, I, ConsistencyKind.CONSISTENT)
        + _synthetic(21669, I, ConsistencyKind.CORRECTNESS_BASED)
        + _synthetic(255, V, ConsistencyKind.INVALIDITY_BASED)
    )
    report = aggregate(records)
    rate = render_percent(report.rate)
    acc = render_percent(report.accuracy)
    ok = (
        report.n_test_cases == 147935
        and report.n_inconsistent == 21924
        and rate == "14.82"
        and report.accuracy_denominator == 147680
        and acc == "69.13"
    )
    check(
        "rate and accuracy",
        ok,
        f"21924/147935 -> {rate}%, 102092/147680 -> {acc}%",
    )


# --------------------------------------------------------------------------
# 6. Inconsistency distance
# --------------------------------------------------------------------------


def test_inconsistency_distance_example() -> None:
    record = distance_from_sets(frozenset({1, 3}), frozenset({2, 3}), 3)
    ok = record.per_pair_distance == Fraction(2, 3) and record.test_count == 3
    check(
        "inconsistency distance",
        ok,
        f"passed sets {{1,3}} vs {{2,3}} over 3 tests -> {record.per_pair_distance}",
    )


# --------------------------------------------------------------------------
# 7. End-to-end run with a scripted mock model
# --------------------------------------------------------------------------


@pytest.fixture(scope="module")
def e2e(tmp_path_factory, corpus):
    base = tmp_path_factory.mktemp("e2e")
    script_path, tasks = make_mock_script(base / "script.jsonl", corpus)
    dataset_path = base / "tasks.jsonl"
    dataset_path.write_text(
        "\n".join(json.dumps(t.to_record()) for t in tasks) + "\n", encoding="utf-8"
    )

    from metamut.ingest import load_dataset

    def run_once(out_dir: Path):
        return run(
            RunConfig(
                dataset=load_dataset(dataset_path, name="mini40"),
                model=ModelSpec(name="mock", backend="mock", script_path=str(script_path)),
                operator_lists=[[Op.SEQUENTIAL_RENAME]],
                out_dir=out_dir,
            )
        )

    start = time.monotonic()
    first = run_once(base / "run_a")
    second = run_once(base / "run_b")
    elapsed = time.monotonic() - start
    return first, second, base, elapsed


def test_end_to_end_mock_run(e2e) -> None:
    first, second, base, elapsed = e2e
    report = first.report
    rate = render_percent(report.rate)
    identical = (base / "run_a" / "report.json").read_bytes() == (
        base / "run_b" / "report.json"
    ).read_bytes()
    ok = (
        not first.harness_failures
        and report.n_test_cases == 40
        and rate == "25.00"
        and report.kind_counts["correctness_based"] == 6
        and report.kind_counts["incorrectness_based"] == 3
        and report.kind_counts["invalidity_based"] == 1
        and report.directions == {
            "incorrect": {"og": 3, "mut": 9},
            "invalid": {"og": 0, "mut": 1},
        }
        and identical
        and elapsed < 60
    )
    check(
        "end-to-end mock run",
        ok,
        f"40 pairs, rate {rate}%, kinds "
        f"{report.kind_counts['correctness_based']}/"
        f"{report.kind_counts['incorrectness_based']}/"
        f"{report.kind_counts['invalidity_based']}, "
        f"byte-identical reports: {identical}, {elapsed:.1f}s",
    )


# --------------------------------------------------------------------------
# 8. Composition semantics
# --------------------------------------------------------------------------


def test_composition_semantics(corpus) -> None:
    failures: list[str] = []
    sample = corpus.tasks[:10]
    for task in sample:
        program = task.subject_program()
        for op in Op:
            single = mutate(program, op, seed=11)
            composed = compose(program, [op], seed=11)
            if single.applied != composed.applied or (
                single.applied and single.mutated_source != composed.mutated_source
            ):
                failures.append(f"{task.task_id}/{op.value}: single != composed")

    pipeline = [Op.CONSTANT_UNFOLD, Op.RANDOM_RENAME]
    for task in corpus.tasks:
        program = task.subject_program()
        outcome = compose(program, pipeline, seed=11)
        if outcome.applied:
            if len(outcome.operator_trace) != 2 or any(
                sites < 1 for _, sites in outcome.operator_trace
            ):
                failures.append(f"{task.task_id}: applied without both stages")
        elif not (outcome.reason or "").startswith("stage "):
            failures.append(f"{task.task_id}: missing failing-stage reason")
    check(
        "composition semantics",
        not failures,
        f"single-op identity on {len(sample)} tasks, two-stage pipeline over "
        f"{len(corpus.tasks)} tasks (failures: {failures[:5]})",
    )


# --------------------------------------------------------------------------
# 9. Confidence threshold sweep
# --------------------------------------------------------------------------


def test_confidence_sweep(e2e) -> None:
    first, _, _, _ = e2e
    thresholds = (0.50, 0.60, 0.70, 0.80, 0.90, 0.95, 0.99)
    counts = [
        len(confidence_filter(first.records, tau).retained) for tau in thresholds
    ]
    monotone = all(a >= b for a, b in zip(counts, counts[1:]))
    check(
        "confidence sweep",
        monotone and counts[0] <= len(first.records),
        f"retained {counts} for thresholds {list(thresholds)}",
    )
