from __future__ import annotations

import time

import pytest

from sandbox_runner import (
    InvalidLiteral,
    eval_output_equal,
    run_entry,
    run_tests,
    split_assertions,
)

ADD = "def add(x, y):\n    return x + y\n"

SUITE = """def check(candidate):
    assert candidate(1, 2) == 3
    assert candidate(0, 0) == 1
    assert candidate(-1, 1) == 0

check(add)
"""


def test_split_assertions_units() -> None:
    units = split_assertions(SUITE)
    assert len(units) == 3
    assert all("candidate" in unit for unit in units)


def test_split_assertions_unsplittable_runs_whole() -> None:
    assert split_assertions("for i in range(3):\n    print(i)\n") == [
        "for i in range(3):\n    print(i)\n"
    ]


def test_run_tests_all_pass() -> None:
    report = run_tests(ADD, "def check(candidate):\n    assert candidate(1, 1) == 2\n", "add", 5)
    assert [r.status for r in report.per_test] == ["Pass"]
    assert report.all_passed


def test_run_tests_middle_failure() -> None:
    report = run_tests(ADD, SUITE, "add", 5)
    assert [r.status for r in report.per_test] == ["Pass", "AssertionError", "Pass"]
    assert not report.all_passed


def test_run_tests_runtime_error_status() -> None:
    report = run_tests(ADD, ["assert candidate('a', 1) == 2\n"], "add", 5)
    assert report.per_test[0].status == "RuntimeError"
    assert "TypeError" in report.per_test[0].message


def test_timeout_aborts_remaining_units() -> None:
    program = "def spin():\n    while True:\n        pass\n"
    start = time.monotonic()
    report = run_tests(program, ["candidate()\n", "assert True\n"], "spin", 1)
    elapsed = time.monotonic() - start
    assert [r.status for r in report.per_test] == ["Timeout", "Timeout"]
    assert elapsed < 3.0  # one timeout + grace; second unit never runs


def test_run_tests_rejects_sub_second_budget() -> None:
    with pytest.raises(ValueError):
        run_tests(ADD, SUITE, "add", 0.1)


def test_determinism_across_runs() -> None:
    program = "import random\n\ndef f():\n    return random.randint(0, 10**6)\n"
    suite = ["value = candidate()\nassert candidate() != value or True\n"]
    first = run_tests(program, suite, "f", 5)
    second = run_tests(program, suite, "f", 5)
    assert [r.status for r in first.per_test] == [r.status for r in second.per_test]


def test_memory_limit_enforced() -> None:
    program = "def hog():\n    return bytearray(3 * 1024**3)\n"
    report = run_tests(program, ["candidate()\n"], "hog", 10)
    assert report.per_test[0].status in ("RuntimeError", "Timeout")


def test_network_disabled() -> None:
    program = (
        "import socket\n\n"
        "def f():\n"
        "    socket.socket(socket.AF_INET, socket.SOCK_STREAM)\n"
    )
    report = run_tests(program, ["candidate()\n"], "f", 5)
    assert report.per_test[0].status == "RuntimeError"
    assert "network" in report.per_test[0].message


def test_run_entry_returns_literal() -> None:
    program = (
        "def f(text, n):\n"
        "    return text.lower() * n\n"
    )
    result = run_entry(program, "f", "'bR', 1", 5)
    assert result["status"] == "Pass"
    assert result["value"] == "'br'"


def test_run_entry_identity_zero() -> None:
    result = run_entry("def f(x):\n    return x\n", "f", "0", 5)
    assert result["value"] == "0"


def test_run_entry_raising_program() -> None:
    result = run_entry("def f():\n    raise ValueError('boom')\n", "f", "", 5)
    assert result["status"] == "RuntimeError"
    assert "ValueError" in result["message"]


# --------------------------------------------------------------------------
# Literal equality
# --------------------------------------------------------------------------


def test_eval_output_equal_quote_style_irrelevant() -> None:
    assert eval_output_equal("'br'", '"br"')


def test_eval_output_equal_container_vs_scalar() -> None:
    assert not eval_output_equal("'br'", "['bR']")
    assert not eval_output_equal("['bR']", "'br'")


def test_eval_output_equal_tuple_vs_list() -> None:
    assert not eval_output_equal("[486, 337, 212]", "(486, 337, 212)")
    assert eval_output_equal("(486, 337, 212)", "(486, 337, 212)")


def test_eval_output_equal_empty_containers() -> None:
    assert eval_output_equal("[]", "[]")
    assert not eval_output_equal("[]", "()")


def test_eval_output_equal_nested_structures() -> None:
    assert eval_output_equal("{'a': [1, (2, 3)]}", "{'a': [1, (2, 3)]}")
    assert not eval_output_equal("{'a': [1, (2, 3)]}", "{'a': [1, [2, 3]]}")


def test_eval_output_equal_invalid_literal() -> None:
    with pytest.raises(InvalidLiteral):
        eval_output_equal("f(1)", "'br'")
