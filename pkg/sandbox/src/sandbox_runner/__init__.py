"""Isolated execution of untrusted Python programs.

Each test unit runs in a fresh worker process (own process group) with a
memory cap, no network, and a fixed PRNG seed; timeouts kill the whole
group.  The package talks to callers either through its Python API or a
line-delimited JSON protocol over stdin/stdout.
"""

from sandbox_runner.runner import (
    InvalidLiteral,
    TestReport,
    TestUnitResult,
    eval_output_equal,
    run_entry,
    run_tests,
    split_assertions,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidLiteral",
    "TestReport",
    "TestUnitResult",
    "eval_output_equal",
    "run_entry",
    "run_tests",
    "split_assertions",
    "__version__",
]
