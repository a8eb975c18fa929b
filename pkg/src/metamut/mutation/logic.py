"""Logical-identity operators.

* De Morgan rewriting of and/or chains,
* boolean literal negation (True ↔ not False),
* operand reordering of commutative + and *,
* unfolding of non-negative integer literals into + / * expressions.
"""

from __future__ import annotations

import ast


# --------------------------------------------------------------------------
# De Morgan
# --------------------------------------------------------------------------


def _statically_boolean(node: ast.expr) -> bool:
    """Conservative check that an expression always evaluates to a bool."""
    if isinstance(node, ast.Compare):
        return True
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        return True
    if isinstance(node, ast.Constant) and isinstance(node.value, bool):
        return True
    if isinstance(node, ast.BoolOp):
        return all(_statically_boolean(v) for v in node.values)
    return False


# Nodes created by this pass carry a marker so they are never revisited.
_INTRODUCED = "_demorgan_introduced"


def _rewrite_boolop(node: ast.BoolOp, counter: list[int]) -> ast.expr:
    flipped = ast.Or() if isinstance(node.op, ast.And) else ast.And()
    counter[0] += 1
    negated = []
    for value in node.values:
        wrapper = ast.UnaryOp(op=ast.Not(), operand=_transform_demorgan(value, counter))
        setattr(wrapper, _INTRODUCED, True)
        negated.append(wrapper)
    inner = ast.BoolOp(op=flipped, values=negated)
    outer = ast.UnaryOp(op=ast.Not(), operand=inner)
    setattr(inner, _INTRODUCED, True)
    setattr(outer, _INTRODUCED, True)
    return outer


def _transform_demorgan(node: ast.expr, counter: list[int]) -> ast.expr:
    if getattr(node, _INTRODUCED, False):
        return node
    if isinstance(node, ast.BoolOp):
        return _rewrite_boolop(node, counter)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        node.operand = _transform_demorgan(node.operand, counter)
        return node
    return node


class _DeMorgan(ast.NodeTransformer):
    """Rewrites eligible and/or chains via De Morgan's laws.

    A chain is eligible when its result is only used for its truth value
    (if / while / ternary / assert tests, comprehension filters) or when
    every operand is statically boolean, so the rewritten form yields an
    identical value rather than just identical truthiness.
    """

    def __init__(self) -> None:
        self.sites = 0

    def _maybe(self, node: ast.expr, truthy_context: bool) -> ast.expr:
        if getattr(node, _INTRODUCED, False):
            return node
        if isinstance(node, ast.BoolOp) and (
            truthy_context or _statically_boolean(node)
        ):
            counter = [0]
            rewritten = _rewrite_boolop(node, counter)
            self.sites += counter[0]
            return rewritten
        return node

    def _test_position(self, node: ast.expr) -> ast.expr:
        node = self.visit(node)
        return self._maybe(node, truthy_context=True)

    def visit_If(self, node: ast.If):
        node.test = self._test_position(node.test)
        node.body = [self.visit(s) for s in node.body]
        node.orelse = [self.visit(s) for s in node.orelse]
        return node

    def visit_While(self, node: ast.While):
        node.test = self._test_position(node.test)
        node.body = [self.visit(s) for s in node.body]
        node.orelse = [self.visit(s) for s in node.orelse]
        return node

    def visit_IfExp(self, node: ast.IfExp):
        node.test = self._test_position(node.test)
        node.body = self.visit(node.body)
        node.orelse = self.visit(node.orelse)
        return node

    def visit_Assert(self, node: ast.Assert):
        node.test = self._test_position(node.test)
        return node

    def visit_comprehension(self, node: ast.comprehension):
        node.iter = self.visit(node.iter)
        node.ifs = [self._test_position(test) for test in node.ifs]
        return node

    def visit_BoolOp(self, node: ast.BoolOp):
        node = self.generic_visit(node)
        return self._maybe(node, truthy_context=False)


def demorgan(tree: ast.Module) -> tuple[ast.Module, int]:
    transformer = _DeMorgan()
    tree = transformer.visit(tree)
    return tree, transformer.sites


# --------------------------------------------------------------------------
# Boolean literals
# --------------------------------------------------------------------------


class _BooleanLiteral(ast.NodeTransformer):
    def __init__(self) -> None:
        self.sites = 0

    def visit_Constant(self, node: ast.Constant):
        if isinstance(node.value, bool):
            self.sites += 1
            return ast.UnaryOp(
                op=ast.Not(), operand=ast.Constant(value=not node.value)
            )
        return node

    def visit_JoinedStr(self, node: ast.JoinedStr):
        return node

    def visit_MatchValue(self, node):
        return node

    def visit_MatchSingleton(self, node):
        return node


def boolean_literal(tree: ast.Module) -> tuple[ast.Module, int]:
    """Replace True with ``not False`` and False with ``not True``."""
    transformer = _BooleanLiteral()
    tree = transformer.visit(tree)
    return tree, transformer.sites


# --------------------------------------------------------------------------
# Commutative reorder
# --------------------------------------------------------------------------


def _numeric_literal(node: ast.expr) -> bool:
    return (
        isinstance(node, ast.Constant)
        and isinstance(node.value, (int, float))
        and not isinstance(node.value, bool)
    )


def _reorder_eligible(node: ast.BinOp) -> bool:
    if not isinstance(node.op, (ast.Add, ast.Mult)):
        return False
    left, right = node.left, node.right
    literal = _numeric_literal(left) or _numeric_literal(right)
    simple = all(
        _numeric_literal(side) or isinstance(side, ast.Name) for side in (left, right)
    )
    return literal and simple


class _CommutativeReorder(ast.NodeTransformer):
    def __init__(self) -> None:
        self.sites = 0

    def visit_BinOp(self, node: ast.BinOp):
        node = self.generic_visit(node)
        if _reorder_eligible(node):
            node.left, node.right = node.right, node.left
            self.sites += 1
        return node


def commutative_reorder(tree: ast.Module) -> tuple[ast.Module, int]:
    """Swap the operands of simple commutative + and * expressions."""
    transformer = _CommutativeReorder()
    tree = transformer.visit(tree)
    return tree, transformer.sites


# --------------------------------------------------------------------------
# Constant unfolding
# --------------------------------------------------------------------------


def smallest_prime_factor(n: int) -> int | None:
    if n < 4:
        return None
    if n % 2 == 0:
        return 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return p
        p += 2
    return None


def _unfold_mult(n: int) -> ast.BinOp:
    return ast.BinOp(left=ast.Constant(value=n), op=ast.Mult(), right=ast.Constant(value=1))


def _unfold_add(n: int) -> ast.BinOp:
    if n == 0:
        return ast.BinOp(
            left=ast.Constant(value=0), op=ast.Add(), right=ast.Constant(value=0)
        )
    return ast.BinOp(
        left=ast.Constant(value=n - 1), op=ast.Add(), right=ast.Constant(value=1)
    )


def _unfold_generic(n: int) -> ast.BinOp:
    factor = smallest_prime_factor(n)
    if factor is not None:
        return ast.BinOp(
            left=ast.Constant(value=factor),
            op=ast.Mult(),
            right=ast.Constant(value=n // factor),
        )
    return _unfold_mult(n)


class _ConstantUnfold(ast.NodeTransformer):
    def __init__(self, unfold) -> None:
        self.unfold = unfold
        self.sites = 0
        self._skip: set[int] = set()

    def _mark_skips(self, tree: ast.AST) -> None:
        for node in ast.walk(tree):
            if isinstance(node, ast.UnaryOp):
                self._skip.add(id(node.operand))
            elif isinstance(node, ast.JoinedStr):
                for child in ast.walk(node):
                    self._skip.add(id(child))
            elif isinstance(node, ast.Slice) and node.step is not None:
                self._skip.add(id(node.step))

    def visit(self, node):
        if not self._skip and isinstance(node, ast.Module):
            self._mark_skips(node)
        return super().visit(node)

    def visit_Constant(self, node: ast.Constant):
        value = node.value
        if (
            type(value) is int
            and value >= 0
            and id(node) not in self._skip
        ):
            self.sites += 1
            return self.unfold(value)
        return node


def _run_unfold(tree: ast.Module, unfold) -> tuple[ast.Module, int]:
    transformer = _ConstantUnfold(unfold)
    tree = transformer.visit(tree)
    return tree, transformer.sites


def constant_unfold(tree: ast.Module) -> tuple[ast.Module, int]:
    """Unfold composite ints into a prime factor product, others into n * 1."""
    return _run_unfold(tree, _unfold_generic)


def constant_unfold_add(tree: ast.Module) -> tuple[ast.Module, int]:
    """Unfold non-negative ints into (n - 1) + 1 (0 becomes 0 + 0)."""
    return _run_unfold(tree, _unfold_add)


def constant_unfold_mult(tree: ast.Module) -> tuple[ast.Module, int]:
    """Unfold non-negative ints into n * 1."""
    return _run_unfold(tree, _unfold_mult)
