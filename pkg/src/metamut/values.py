"""Safe parsing, comparison, and rendering of literal values.

Model answers and expected outputs travel as Python literal text.  They
are evaluated with ``ast.literal_eval`` (never ``eval``) and compared
structurally with strict type checks, so ``'br'`` never equals
``['bR']``, ``[1, 2]`` never equals ``(1, 2)``, and ``True`` never
equals ``1``.
"""

from __future__ import annotations

import ast
from typing import Any


class NotALiteral(ValueError):
    """Raised when text does not parse as a Python literal."""


def parse_literal(text: str) -> Any:
    """Evaluate literal text safely, raising NotALiteral on failure."""
    try:
        return ast.literal_eval(text.strip())
    except (ValueError, SyntaxError, MemoryError, RecursionError, TypeError) as exc:
        raise NotALiteral(f"not a literal: {text!r}") from exc


def is_literal(text: str) -> bool:
    try:
        parse_literal(text)
    except NotALiteral:
        return False
    return True


def safe_equal(a: Any, b: Any) -> bool:
    """Structural equality with strict types at every level."""
    if type(a) is not type(b):
        return False
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(safe_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        if len(a) != len(b):
            return False
        for key, value in a.items():
            if key not in b or not safe_equal(value, b[key]):
                return False
            # dict lookup uses plain equality, so confirm the matching
            # key has the same type as well (True vs 1, 1 vs 1.0).
            matching = next(k for k in b if k == key)
            if type(matching) is not type(key):
                return False
        return True
    if isinstance(a, float):
        return a == b or (a != a and b != b)
    return bool(a == b)


def render_value(value: Any) -> str:
    """Canonical literal text for a value (repr round-trip)."""
    return repr(value)
