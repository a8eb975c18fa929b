"""In-process execution of subject programs and their test suites.

Programs run under ``exec`` in a fresh namespace with a wall-clock
timeout enforced by ``signal.setitimer``.  ``check(candidate)``-style
test suites are split into one unit per assertion so each assertion
passes or fails independently.

This executor trades isolation for speed; it is meant for trusted
benchmark code.  The separate sandbox runner provides process-level
isolation behind the same report shape.
"""

from __future__ import annotations

import ast
import enum
import signal
from dataclasses import dataclass, field
from typing import Any, Sequence


class TestStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"
    TIMEOUT = "timeout"


@dataclass
class TestResult:
    status: TestStatus
    detail: str | None = None

    @property
    def passed(self) -> bool:
        return self.status is TestStatus.PASS


@dataclass
class TestReport:
    """Per-test outcomes for one program run against one suite."""

    results: list[TestResult] = field(default_factory=list)

    @property
    def statuses(self) -> list[TestStatus]:
        return [r.status for r in self.results]

    @property
    def passed_indices(self) -> set[int]:
        return {i for i, r in enumerate(self.results) if r.passed}

    @property
    def all_passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)


class ExecutionTimeout(Exception):
    """Raised inside the subject program when the timer fires."""


def _alarm_handler(signum, frame):  # pragma: no cover - trivial
    raise ExecutionTimeout()


def _run_with_timeout(fn, timeout_s: float):
    previous = signal.signal(signal.SIGALRM, _alarm_handler)
    signal.setitimer(signal.ITIMER_REAL, max(timeout_s, 0.001))
    try:
        return fn()
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def split_assertions(test_source: str) -> list[str]:
    """Split a flat assertion suite into independent test units.

    Unit ``k`` consists of every non-assert top-level statement that
    precedes assertion ``k``, followed by assertion ``k`` itself.  A
    suite wrapped in a ``def check(...)`` function is unwrapped first.
    """
    tree = ast.parse(test_source)
    body = tree.body
    check_fns = [
        node
        for node in body
        if isinstance(node, ast.FunctionDef)
        and (node.name.startswith("check") or len(body) == 1)
    ]
    if check_fns:
        check = check_fns[0]
        body = check.body
        if check.args.args:
            param = check.args.args[0].arg
            if param != "candidate":

                class _Alias(ast.NodeTransformer):
                    def visit_Name(self, node: ast.Name):
                        if node.id == param:
                            node.id = "candidate"
                        return node

                body = [_Alias().visit(stmt) for stmt in body]
    setup: list[ast.stmt] = []
    units: list[str] = []
    for stmt in body:
        if isinstance(stmt, ast.Assert):
            unit = ast.Module(body=[*setup, stmt], type_ignores=[])
            ast.fix_missing_locations(unit)
            units.append(ast.unparse(unit) + "\n")
        else:
            setup.append(stmt)
    if not units and body:
        module = ast.Module(body=list(body), type_ignores=[])
        ast.fix_missing_locations(module)
        units.append(ast.unparse(module) + "\n")
    return units


@dataclass
class CallOutcome:
    status: TestStatus
    value: Any = None
    detail: str | None = None


class InProcessExecutor:
    """Runs subject programs via exec() with signal-based timeouts."""

    def __init__(self, timeout_s: float = 3.0) -> None:
        self.timeout_s = timeout_s

    def _load(self, program: str) -> dict[str, Any]:
        namespace: dict[str, Any] = {"__name__": "__subject__"}
        exec(compile(program, "<subject>", "exec"), namespace)
        return namespace

    def call_entry(
        self, program: str, entry_point: str, args_source: str
    ) -> CallOutcome:
        """Call ``entry_point(<args_source>)`` and capture the result.

        ``args_source`` is the literal argument list text, e.g.
        ``"'hiho', 2"``.
        """

        def run():
            namespace = self._load(program)
            if entry_point not in namespace:
                raise NameError(f"entry point {entry_point!r} not defined")
            call = f"__entry__({args_source})" if args_source.strip() else "__entry__()"
            namespace["__entry__"] = namespace[entry_point]
            return eval(call, namespace)

        try:
            value = _run_with_timeout(run, self.timeout_s)
        except ExecutionTimeout:
            return CallOutcome(TestStatus.TIMEOUT, detail="timed out")
        except BaseException as exc:
            return CallOutcome(
                TestStatus.ERROR, detail=f"{type(exc).__name__}: {exc}"
            )
        return CallOutcome(TestStatus.PASS, value=value)

    def run_tests(
        self,
        program: str,
        tests: Sequence[str],
        entry_point: str | None = None,
    ) -> TestReport:
        """Run each test unit against the program in a fresh namespace.

        Tests may reference the entry point by its own name or as
        ``candidate``.  A timeout on one unit marks all later units as
        timed out as well, mirroring the sandbox runner's behavior.
        """
        report = TestReport()
        timed_out = False
        for test in tests:
            if timed_out:
                report.results.append(
                    TestResult(TestStatus.TIMEOUT, detail="skipped after timeout")
                )
                continue

            def run(test=test):
                namespace = self._load(program)
                if entry_point and entry_point in namespace:
                    namespace.setdefault("candidate", namespace[entry_point])
                exec(compile(test, "<test>", "exec"), namespace)

            try:
                _run_with_timeout(run, self.timeout_s)
            except ExecutionTimeout:
                timed_out = True
                report.results.append(TestResult(TestStatus.TIMEOUT, detail="timed out"))
            except AssertionError as exc:
                report.results.append(
                    TestResult(TestStatus.FAIL, detail=str(exc) or "assertion failed")
                )
            except BaseException as exc:
                report.results.append(
                    TestResult(TestStatus.ERROR, detail=f"{type(exc).__name__}: {exc}")
                )
            else:
                report.results.append(TestResult(TestStatus.PASS))
        return report
