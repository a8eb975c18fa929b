"""Parsing and rendering of subject-language (Python 3) source.

Rendering is built on the stdlib unparser with two adjustments:

* tuple assignment/loop targets render without parentheses
  (``for i, c in ...`` rather than ``for (i, c) in ...``), matching how
  newer CPython versions unparse;
* string constants carrying a ``_quote_style`` marker of ``'"'`` render
  double-quoted when that is safe.  Everything else defaults to the
  unparser's single-quoted style.

Mutation passes communicate with the renderer only through node
attributes, so trees without markers render exactly like ``ast.unparse``.
"""

from __future__ import annotations

import ast

QUOTE_STYLE_ATTR = "_quote_style"


def parse(source: str) -> ast.Module:
    """Parse subject source, raising SyntaxError with line/column info."""
    return ast.parse(source)


class SourceRenderer(ast._Unparser):
    """Unparser with tuple-target and quote-style handling."""

    def visit_Tuple(self, node):
        if node.elts and self.get_precedence(node) <= ast._Precedence.TUPLE:
            self.items_view(self.traverse, node.elts)
        else:
            super().visit_Tuple(node)

    def _set_tuple_precedence(self, *targets):
        for target in targets:
            self.set_precedence(ast._Precedence.TUPLE, target)

    def visit_Assign(self, node):
        self._set_tuple_precedence(*node.targets)
        super().visit_Assign(node)

    def visit_For(self, node):
        self._set_tuple_precedence(node.target)
        super().visit_For(node)

    def visit_AsyncFor(self, node):
        self._set_tuple_precedence(node.target)
        super().visit_AsyncFor(node)

    def visit_comprehension(self, node):
        self._set_tuple_precedence(node.target)
        super().visit_comprehension(node)

    def visit_Constant(self, node):
        value = node.value
        if (
            isinstance(value, str)
            and getattr(node, QUOTE_STYLE_ATTR, None) == '"'
            and can_double_quote(value)
        ):
            self.write('"' + value + '"')
        else:
            super().visit_Constant(node)


def can_double_quote(value: str) -> bool:
    """True when a string renders verbatim between double quotes."""
    return '"' not in value and repr(value) == "'" + value + "'"


def render(tree: ast.AST) -> str:
    """Render a tree back to source text (trailing newline included)."""
    ast.fix_missing_locations(tree)
    return SourceRenderer().visit(tree) + "\n"


def structurally_equal(a: ast.AST, b: ast.AST) -> bool:
    """Structural tree equality, ignoring positions and formatting."""
    return ast.dump(a, include_attributes=False) == ast.dump(b, include_attributes=False)
