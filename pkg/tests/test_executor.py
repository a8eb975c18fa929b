from __future__ import annotations

import time

from metamut.executor import (
    InProcessExecutor,
    TestStatus,
    split_assertions,
)

PROGRAM = "def add(x, y):\n    return x + y\n"

SUITE = """def check(candidate):
    assert candidate(1, 2) == 3
    assert candidate(0, 0) == 1
    assert candidate(-1, 1) == 0

check(add)
"""


def test_split_assertions_one_unit_per_assert() -> None:
    units = split_assertions(SUITE)
    assert len(units) == 3
    for unit in units:
        assert unit.count("assert") == 1
        assert "candidate" in unit


def test_split_assertions_carries_setup_statements() -> None:
    suite = (
        "x = [1, 2]\n"
        "assert sum(x) == 3\n"
        "y = x + [3]\n"
        "assert sum(y) == 6\n"
    )
    units = split_assertions(suite)
    assert len(units) == 2
    assert "x = [1, 2]" in units[0] and "y" not in units[0]
    assert "y = x + [3]" in units[1]


def test_split_assertions_unsplittable_suite_runs_whole() -> None:
    suite = "for i in range(3):\n    print(i)\n"
    units = split_assertions(suite)
    assert len(units) == 1


def test_run_tests_statuses() -> None:
    executor = InProcessExecutor(timeout_s=2)
    report = executor.run_tests(PROGRAM, split_assertions(SUITE), "add")
    assert [r.status for r in report.results] == [
        TestStatus.PASS,
        TestStatus.FAIL,
        TestStatus.PASS,
    ]
    assert report.passed_indices == {0, 2}
    assert not report.all_passed


def test_run_tests_error_status() -> None:
    executor = InProcessExecutor(timeout_s=2)
    report = executor.run_tests(PROGRAM, ["assert candidate('a', 1) == 2\n"], "add")
    assert report.results[0].status is TestStatus.ERROR
    assert "TypeError" in report.results[0].detail


def test_timeout_aborts_rest_of_suite() -> None:
    program = "def spin():\n    while True:\n        pass\n"
    executor = InProcessExecutor(timeout_s=0.2)
    start = time.monotonic()
    report = executor.run_tests(
        program, ["candidate()\n", "assert True\n"], "spin"
    )
    elapsed = time.monotonic() - start
    assert [r.status for r in report.results] == [
        TestStatus.TIMEOUT,
        TestStatus.TIMEOUT,
    ]
    assert elapsed < 2.0


def test_call_entry_returns_value() -> None:
    executor = InProcessExecutor(timeout_s=2)
    outcome = executor.call_entry(PROGRAM, "add", "2, 3")
    assert outcome.status is TestStatus.PASS
    assert outcome.value == 5


def test_call_entry_reports_exception() -> None:
    executor = InProcessExecutor(timeout_s=2)
    outcome = executor.call_entry("def f():\n    raise ValueError('boom')\n", "f", "")
    assert outcome.status is TestStatus.ERROR
    assert "ValueError" in outcome.detail


def test_call_entry_missing_entry_point() -> None:
    executor = InProcessExecutor(timeout_s=2)
    outcome = executor.call_entry(PROGRAM, "missing", "1, 2")
    assert outcome.status is TestStatus.ERROR
    assert "NameError" in outcome.detail


def test_call_entry_timeout() -> None:
    executor = InProcessExecutor(timeout_s=0.2)
    outcome = executor.call_entry("def f():\n    while True:\n        pass\n", "f", "")
    assert outcome.status is TestStatus.TIMEOUT
