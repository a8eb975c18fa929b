"""Run programs and per-assertion test units in isolated subprocesses."""

from __future__ import annotations

import ast
import json
import os
import signal
import subprocess
import sys
import time
from dataclasses import dataclass, field

STATUSES = ("Pass", "AssertionError", "RuntimeError", "Timeout")
DEFAULT_TIMEOUT_S = 10.0


class InvalidLiteral(ValueError):
    """A value that should be a safe literal is not one."""


@dataclass
class TestUnitResult:
    test_index: int
    status: str
    message: str = ""

    def to_json(self) -> dict:
        return {
            "test_index": self.test_index,
            "status": self.status,
            "message": self.message,
        }


@dataclass
class TestReport:
    per_test: list[TestUnitResult] = field(default_factory=list)
    wall_ms: int = 0

    @property
    def all_passed(self) -> bool:
        return bool(self.per_test) and all(r.status == "Pass" for r in self.per_test)

    def to_json(self) -> dict:
        return {
            "per_test": [r.to_json() for r in self.per_test],
            "wall_ms": self.wall_ms,
        }


# --------------------------------------------------------------------------
# Suite splitting
# --------------------------------------------------------------------------


def _render(statements: list[ast.stmt]) -> str:
    module = ast.Module(body=statements, type_ignores=[])
    return ast.unparse(ast.fix_missing_locations(module)) + "\n"


class _AliasParam(ast.NodeTransformer):
    def __init__(self, param: str) -> None:
        self.param = param

    def visit_Name(self, node: ast.Name) -> ast.AST:
        if node.id == self.param:
            return ast.copy_location(ast.Name(id="candidate", ctx=node.ctx), node)
        return node


def split_assertions(test_source: str) -> list[str]:
    """One unit per assert, each carrying its preceding setup statements.

    A ``def check(candidate)``-style wrapper is unwrapped and its
    parameter aliased to ``candidate``.  Suites that cannot be split run
    whole as a single unit.
    """
    try:
        tree = ast.parse(test_source)
    except SyntaxError:
        return [test_source]

    body = tree.body
    for node in tree.body:
        if isinstance(node, ast.FunctionDef) and (
            node.name.startswith("check")
            or sum(isinstance(n, ast.FunctionDef) for n in tree.body) == 1
        ):
            if node.args.args:
                aliaser = _AliasParam(node.args.args[0].arg)
                body = [aliaser.visit(stmt) for stmt in node.body]
            else:
                body = node.body
            break

    units: list[str] = []
    setup: list[ast.stmt] = []
    for statement in body:
        if isinstance(statement, ast.Assert):
            units.append(_render(setup + [statement]))
        else:
            setup.append(statement)
    if not units:
        return [test_source]
    return units


# --------------------------------------------------------------------------
# Worker orchestration
# --------------------------------------------------------------------------


def _run_worker(job: dict, timeout_s: float) -> dict:
    env = dict(os.environ, PYTHONHASHSEED="0")
    process = subprocess.Popen(
        [sys.executable, "-m", "sandbox_runner.worker"],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        start_new_session=True,
        text=True,
        env=env,
    )
    try:
        stdout, stderr = process.communicate(json.dumps(job), timeout=timeout_s)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(process.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        process.wait()
        return {"status": "Timeout", "message": f"no result within {timeout_s}s"}
    if process.returncode != 0:
        detail = (stderr or "").strip().splitlines()
        return {
            "status": "RuntimeError",
            "message": "worker crashed: " + (detail[-1] if detail else "no output"),
        }
    try:
        return json.loads(stdout)
    except json.JSONDecodeError:
        return {"status": "RuntimeError", "message": "worker produced no result"}


def run_tests(
    program_source: str,
    test_source: str | list[str],
    entry_point: str | None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> TestReport:
    """Execute a test suite one assertion unit at a time.

    A timeout on unit k aborts the suite: units after k are marked
    Timeout without running.
    """
    if timeout_s < 1:
        raise ValueError("timeout_s must be >= 1")
    units = (
        list(test_source)
        if isinstance(test_source, list)
        else split_assertions(test_source)
    )
    started = time.monotonic()
    report = TestReport()
    aborted = False
    for index, unit in enumerate(units):
        if aborted:
            report.per_test.append(
                TestUnitResult(index, "Timeout", "suite aborted by earlier timeout")
            )
            continue
        result = _run_worker(
            {
                "mode": "unit",
                "program": program_source,
                "code": unit,
                "entry_point": entry_point,
            },
            timeout_s,
        )
        report.per_test.append(
            TestUnitResult(index, result["status"], result.get("message", ""))
        )
        if result["status"] == "Timeout":
            aborted = True
    report.wall_ms = int((time.monotonic() - started) * 1000)
    return report


def run_entry(
    program_source: str,
    entry_point: str,
    input_literal: str,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> dict:
    """Call the program's entry point on literal arguments.

    Returns ``{"status", "message", "value"?}`` where value is the
    rendered literal of the call result.
    """
    return _run_worker(
        {
            "mode": "entry",
            "program": program_source,
            "entry_point": entry_point,
            "input": input_literal,
        },
        timeout_s,
    )


# --------------------------------------------------------------------------
# Literal comparison
# --------------------------------------------------------------------------


def _parse(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError, MemoryError, RecursionError) as exc:
        raise InvalidLiteral(f"not a literal: {text!r}") from exc


def _structurally_equal(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, float) and a != a and b != b:
        return True
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(
            _structurally_equal(x, y) for x, y in zip(a, b)
        )
    if isinstance(a, dict):
        if len(a) != len(b):
            return False
        for key, value in a.items():
            if key not in b or type(key) not in {type(k) for k in b if k == key}:
                return False
            if not _structurally_equal(value, b[key]):
                return False
        return True
    if isinstance(a, (set, frozenset)):
        return a == b and {type(x) for x in a} == {type(y) for y in b}
    return a == b


def eval_output_equal(expected_literal: str, answer_literal: str) -> bool:
    """Structural, type-strict equality of two rendered literals.

    ``'br'`` equals ``"br"`` (same value), but ``['bR']`` never equals
    ``'br'`` and a tuple never equals a list of the same elements.
    """
    return _structurally_equal(_parse(expected_literal), _parse(answer_literal))
