"""String literal quote-style flipping.

Only plain, single-line string literals whose source text contains no
escapes are touched: the literal must read back verbatim between its
quotes and the opposite quote character must not occur in the value.
Docstrings, f-strings, byte strings, prefixed literals, and
triple-quoted strings are all left alone.
"""

from __future__ import annotations

import ast

from metamut.rendering import QUOTE_STYLE_ATTR, can_double_quote


def _docstring_nodes(tree: ast.Module) -> set[int]:
    nodes: set[int] = set()
    for scope in ast.walk(tree):
        if isinstance(
            scope, (ast.Module, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)
        ):
            body = scope.body
            if (
                body
                and isinstance(body[0], ast.Expr)
                and isinstance(body[0].value, ast.Constant)
                and isinstance(body[0].value.value, str)
            ):
                nodes.add(id(body[0].value))
    return nodes


def _joined_str_children(tree: ast.Module) -> set[int]:
    nodes: set[int] = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.JoinedStr):
            for child in ast.walk(node):
                if isinstance(child, ast.Constant):
                    nodes.add(id(child))
    return nodes


def _flippable(node: ast.Constant, segment: str | None) -> str | None:
    """Return the current quote char if this literal can be flipped."""
    value = node.value
    if not isinstance(value, str) or segment is None or len(segment) < 2:
        return None
    quote = segment[0]
    if quote not in "'\"" or segment[-1] != quote:
        return None
    if segment.startswith(quote * 3):
        return None
    if segment[1:-1] != value:
        return None
    target = '"' if quote == "'" else "'"
    if target in value:
        return None
    if quote == "'" and not can_double_quote(value):
        return None
    return quote


def annotate_quote_styles(tree: ast.Module, source: str) -> ast.Module:
    """Mark plain string literals with their original quote character.

    This keeps double-quoted literals double-quoted when a tree is
    rendered back to text, so re-rendering an unmutated program does not
    silently change quote styles that the flip operator cares about.
    """
    for node in ast.walk(tree):
        if isinstance(node, ast.Constant):
            quote = _flippable(node, ast.get_source_segment(source, node))
            if quote is not None:
                setattr(node, QUOTE_STYLE_ATTR, quote)
    return tree


def flip_string_quotes(tree: ast.Module, source: str) -> tuple[ast.Module, int]:
    """Flip the quote style of every eligible string literal in place."""
    excluded = _docstring_nodes(tree) | _joined_str_children(tree)
    sites = 0
    for node in ast.walk(tree):
        if not isinstance(node, ast.Constant) or id(node) in excluded:
            continue
        segment = ast.get_source_segment(source, node)
        quote = _flippable(node, segment)
        if quote is None:
            continue
        setattr(node, QUOTE_STYLE_ATTR, '"' if quote == "'" else "'")
        sites += 1
    return tree, sites
