"""Loop restructuring operators: for→while and for→enumerate.

Both operators introduce fresh helper variables drawn from a shared
per-program allocator (``loop_var0``, ``length_var3``,
``new_reversed_var4``, ...).  Each rewritten loop reserves a fixed block
of numbered slots so helper names stay stable regardless of which
helpers a particular loop needs.
"""

from __future__ import annotations

import ast
import copy

from metamut.mutation.rename import all_identifiers

# Slots burned between the loop counter and the optional length helper,
# keeping numbering stable across loops with different helper needs.
_RESERVED_SLOTS = 2


class FreshNameAllocator:
    """Hands out numbered helper names, skipping taken identifiers."""

    def __init__(self, tree: ast.Module) -> None:
        self.taken = all_identifiers(tree)
        self.counter = 0

    def _draw(self, prefix: str) -> str:
        while True:
            name = f"{prefix}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name

    def burn(self, count: int) -> None:
        self.counter += count

    def loop_name(self) -> str:
        return self._draw("loop_var")

    def length_name(self) -> str:
        return self._draw("length_var")

    def reversed_name(self) -> str:
        return self._draw("new_reversed_var")


def _is_reversed_call(node: ast.expr) -> bool:
    return (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "reversed"
        and len(node.args) == 1
        and not node.keywords
    )


def _statically_indexable(node: ast.expr) -> bool:
    """Expressions safe to evaluate repeatedly and index by position."""
    if isinstance(node, (ast.List, ast.Tuple, ast.Subscript)):
        return True
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return True
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "range"
        and not node.keywords
    ):
        return True
    return False


def _prefix_continues(body: list[ast.stmt], increment: ast.stmt) -> list[ast.stmt]:
    """Duplicate the counter increment before each continue this loop owns."""

    def rewrite(stmts: list[ast.stmt]) -> list[ast.stmt]:
        out: list[ast.stmt] = []
        for stmt in stmts:
            if isinstance(stmt, ast.Continue):
                out.append(copy.deepcopy(increment))
                out.append(stmt)
                continue
            if not isinstance(
                stmt,
                (
                    ast.For,
                    ast.AsyncFor,
                    ast.While,
                    ast.FunctionDef,
                    ast.AsyncFunctionDef,
                ),
            ):
                for field in ("body", "orelse", "finalbody"):
                    inner = getattr(stmt, field, None)
                    if inner:
                        setattr(stmt, field, rewrite(inner))
                if isinstance(stmt, ast.Try):
                    for handler in stmt.handlers:
                        handler.body = rewrite(handler.body)
            out.append(stmt)
        return out

    return rewrite(body)


def _while_eligible(node: ast.For) -> bool:
    if node.orelse:
        return False
    it = node.iter
    return isinstance(it, ast.Name) or _is_reversed_call(it) or _statically_indexable(it)


def _assign(target: ast.expr, value: ast.expr) -> ast.Assign:
    return ast.Assign(targets=[target], value=value)


def _name(ident: str, ctx: ast.expr_context | None = None) -> ast.Name:
    return ast.Name(id=ident, ctx=ctx or ast.Load())


def _len_call(arg: ast.expr) -> ast.Call:
    return ast.Call(func=_name("len"), args=[arg], keywords=[])


def _subscript(value: ast.expr, index: ast.expr) -> ast.Subscript:
    return ast.Subscript(value=value, slice=index, ctx=ast.Load())


class _ForToWhile(ast.NodeTransformer):
    def __init__(self, allocator: FreshNameAllocator) -> None:
        self.allocator = allocator
        self.sites = 0

    def visit_For(self, node: ast.For):
        node = self.generic_visit(node)
        if not _while_eligible(node):
            return node
        self.sites += 1
        alloc = self.allocator
        loop = alloc.loop_name()
        alloc.burn(_RESERVED_SLOTS)

        prelude: list[ast.stmt] = []
        iterable = node.iter
        if isinstance(iterable, ast.Name):
            indexed: ast.expr = _name(iterable.id)
            bound: ast.expr = _len_call(_name(iterable.id))
        else:
            length = alloc.length_name()
            if _is_reversed_call(iterable):
                materialized = alloc.reversed_name()
                reverse_slice = ast.Slice(
                    step=ast.UnaryOp(op=ast.USub(), operand=ast.Constant(value=1))
                )
                prelude.append(
                    _assign(
                        _name(materialized, ast.Store()),
                        _subscript(iterable.args[0], reverse_slice),
                    )
                )
                indexed = _name(materialized)
            else:
                indexed = iterable
            prelude.insert(
                0 if not prelude else 1,
                _assign(_name(length, ast.Store()), _len_call(indexed)),
            )
            bound = _name(length)

        prelude.append(_assign(_name(loop, ast.Store()), ast.Constant(value=0)))
        increment = ast.AugAssign(
            target=_name(loop, ast.Store()), op=ast.Add(), value=ast.Constant(value=1)
        )
        body = [
            _assign(node.target, _subscript(indexed, _name(loop))),
            *_prefix_continues(node.body, increment),
            increment,
        ]
        while_node = ast.While(
            test=ast.Compare(left=_name(loop), ops=[ast.Lt()], comparators=[bound]),
            body=body,
            orelse=[],
        )
        return prelude + [while_node]


class _ForToEnumerate(ast.NodeTransformer):
    def __init__(self, allocator: FreshNameAllocator) -> None:
        self.allocator = allocator
        self.sites = 0

    def visit_For(self, node: ast.For):
        node = self.generic_visit(node)
        if not isinstance(node.target, ast.Name):
            return node
        self.sites += 1
        index = self.allocator.loop_name()
        node.target = ast.Tuple(
            elts=[_name(index, ast.Store()), node.target], ctx=ast.Store()
        )
        node.iter = ast.Call(func=_name("enumerate"), args=[node.iter], keywords=[])
        return node


def for_to_while(tree: ast.Module) -> tuple[ast.Module, int]:
    """Rewrite every eligible for loop as an index-driven while loop."""
    transformer = _ForToWhile(FreshNameAllocator(tree))
    tree = transformer.visit(tree)
    return tree, transformer.sites


def for_to_enumerate(tree: ast.Module) -> tuple[ast.Module, int]:
    """Wrap every name-target for loop's iterable in enumerate()."""
    transformer = _ForToEnumerate(FreshNameAllocator(tree))
    tree = transformer.visit(tree)
    return tree, transformer.sites
