"""Identifier renaming operators (random and sequential).

Renaming covers top-level function names, their parameters, and locals
bound by assignment inside them.  Builtins, imported names, attribute
names, names declared ``global``/``nonlocal``, and single-character
index-style locals (``i``, ``j``, ``k``) are left untouched.  Parameters
are always renamed, single-character or not.
"""

from __future__ import annotations

import ast
import builtins
import random
import string

_BUILTIN_NAMES = frozenset(dir(builtins))

RANDOM_NAME_MIN = 8
RANDOM_NAME_MAX = 12


def _imported_names(tree: ast.Module) -> set[str]:
    names: set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, (ast.Import, ast.ImportFrom)):
            for alias in node.names:
                names.add(alias.asname or alias.name.split(".")[0])
    return names


def all_identifiers(tree: ast.Module) -> set[str]:
    """Every identifier appearing in the program, for collision checks."""
    names: set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            names.add(node.id)
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            names.add(node.name)
        elif isinstance(node, ast.arg):
            names.add(node.arg)
        elif isinstance(node, ast.Attribute):
            names.add(node.attr)
        elif isinstance(node, ast.alias):
            names.add(node.asname or node.name.split(".")[0])
        elif isinstance(node, (ast.Global, ast.Nonlocal)):
            names.update(node.names)
    return names


def _bound_names(scope: ast.AST) -> set[str]:
    """Names bound inside a function scope, nested scopes excluded."""
    bound: set[str] = set()

    def visit(node: ast.AST) -> None:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
                bound.add(getattr(child, "name", ""))
                continue
            if isinstance(child, ast.Name) and isinstance(child.ctx, (ast.Store, ast.Del)):
                bound.add(child.id)
            elif isinstance(child, ast.arg):
                bound.add(child.arg)
            visit(child)

    for item in ast.iter_child_nodes(scope):
        if isinstance(item, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
            bound.add(getattr(item, "name", ""))
            continue
        if isinstance(item, ast.Name) and isinstance(item.ctx, (ast.Store, ast.Del)):
            bound.add(item.id)
        elif isinstance(item, ast.arg):
            bound.add(item.arg)
        visit(item)
    bound.discard("")
    return bound


def _param_names(fn: ast.FunctionDef) -> list[str]:
    args = fn.args
    ordered = [a.arg for a in args.posonlyargs + args.args]
    if args.vararg:
        ordered.append(args.vararg.arg)
    ordered.extend(a.arg for a in args.kwonlyargs)
    if args.kwarg:
        ordered.append(args.kwarg.arg)
    return ordered


def _declared_global(fn: ast.FunctionDef) -> set[str]:
    names: set[str] = set()
    for node in ast.walk(fn):
        if isinstance(node, (ast.Global, ast.Nonlocal)):
            names.update(node.names)
    return names


def _renameable_locals(fn: ast.FunctionDef, skip: set[str]) -> list[str]:
    """Locals bound by assignment in first-occurrence order."""
    params = set(_param_names(fn))
    excluded = params | skip | _declared_global(fn)
    ordered: list[str] = []
    seen: set[str] = set()

    def consider(name: str) -> None:
        if name in seen or name in excluded:
            return
        if len(name) == 1 or name in _BUILTIN_NAMES:
            return
        seen.add(name)
        ordered.append(name)

    def visit(node: ast.AST) -> None:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
                continue
            if isinstance(child, ast.Name) and isinstance(child.ctx, ast.Store):
                consider(child.id)
            visit(child)

    for stmt in fn.body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue
        if isinstance(stmt, ast.Name) and isinstance(stmt.ctx, ast.Store):
            consider(stmt.id)
        visit(stmt)
    return ordered


def _top_level_functions(tree: ast.Module, entry_point: str | None) -> list[ast.FunctionDef]:
    defs = [n for n in tree.body if isinstance(n, ast.FunctionDef)]
    if entry_point:
        defs.sort(key=lambda d: 0 if d.name == entry_point else 1)
    return defs


class RenamePlan:
    """Per-program rename maps, shared by both rename operators."""

    def __init__(self) -> None:
        self.func_map: dict[str, str] = {}
        self.local_maps: dict[str, dict[str, str]] = {}

    def is_empty(self) -> bool:
        if any(old != new for old, new in self.func_map.items()):
            return False
        for mapping in self.local_maps.values():
            if any(old != new for old, new in mapping.items()):
                return False
        return True


def _build_plan(
    tree: ast.Module,
    entry_point: str | None,
    namer,
) -> RenamePlan:
    plan = RenamePlan()
    imported = _imported_names(tree)
    skip = imported | _BUILTIN_NAMES
    for fn in _top_level_functions(tree, entry_point):
        if fn.name in imported:
            continue
        plan.func_map[fn.name] = namer.function_name(fn.name)
        local_map: dict[str, str] = {}
        for param in _param_names(fn):
            if param in _BUILTIN_NAMES:
                continue
            local_map[param] = namer.variable_name(param)
        for local in _renameable_locals(fn, skip):
            local_map[local] = namer.variable_name(local)
        plan.local_maps[fn.name] = local_map
    return plan


class _RandomNamer:
    def __init__(self, rng: random.Random, taken: set[str]) -> None:
        self.rng = rng
        self.taken = set(taken) | _BUILTIN_NAMES

    def _fresh(self) -> str:
        while True:
            length = self.rng.randint(RANDOM_NAME_MIN, RANDOM_NAME_MAX)
            name = "".join(self.rng.choice(string.ascii_letters) for _ in range(length))
            if name not in self.taken and not name.startswith("__"):
                self.taken.add(name)
                return name

    def function_name(self, old: str) -> str:
        return self._fresh()

    def variable_name(self, old: str) -> str:
        return self._fresh()


class _SequentialNamer:
    def __init__(self, taken: set[str]) -> None:
        self.taken = taken
        self.next_function = 1
        self.next_variable = 1

    def _numbered(self, prefix: str, counter: int, old: str) -> tuple[str, int]:
        while True:
            candidate = f"{prefix}{counter}"
            counter += 1
            if candidate == old or candidate not in self.taken:
                return candidate, counter

    def function_name(self, old: str) -> str:
        name, self.next_function = self._numbered(
            "generic_function", self.next_function, old
        )
        return name

    def variable_name(self, old: str) -> str:
        name, self.next_variable = self._numbered("var", self.next_variable, old)
        return name


def _apply_plan(tree: ast.Module, plan: RenamePlan) -> int:
    """Rewrite identifiers per plan; returns the changed-occurrence count."""
    changed = 0

    def rename_in(node: ast.AST, mapping: dict[str, str]) -> None:
        nonlocal changed
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)):
                inner = {
                    k: v for k, v in mapping.items() if k not in _bound_names(child)
                }
                rename_in(child, inner)
                continue
            if isinstance(child, ast.Name):
                new = mapping.get(child.id)
                if new is not None and new != child.id:
                    child.id = new
                    changed += 1
            elif isinstance(child, ast.arg):
                new = mapping.get(child.arg)
                if new is not None and new != child.arg:
                    child.arg = new
                    changed += 1
            elif isinstance(child, ast.Call):
                fn = child.func
                if isinstance(fn, ast.Name):
                    callee = _original_name(plan, fn.id, mapping)
                    params = plan.local_maps.get(callee, {})
                    for kw in child.keywords:
                        if kw.arg is not None and kw.arg in params:
                            if params[kw.arg] != kw.arg:
                                kw.arg = params[kw.arg]
                                changed += 1
            rename_in(child, mapping)

    for node in tree.body:
        if isinstance(node, ast.FunctionDef) and node.name in plan.func_map:
            old = node.name
            mapping = dict(plan.func_map)
            mapping.update(plan.local_maps.get(old, {}))
            new_name = plan.func_map[old]
            if new_name != old:
                node.name = new_name
                changed += 1
            rename_in(node, mapping)
        else:
            rename_in(node, dict(plan.func_map))
            if isinstance(node, ast.Name):
                new = plan.func_map.get(node.id)
                if new is not None and new != node.id:
                    node.id = new
                    changed += 1
    return changed


def _original_name(plan: RenamePlan, current: str, mapping: dict[str, str]) -> str:
    # Calls are rewritten in child-first order is not guaranteed, so accept
    # either the original or the already-renamed function name.
    if current in plan.local_maps:
        return current
    for old, new in plan.func_map.items():
        if new == current:
            return old
    return current


def rename_random(
    tree: ast.Module, rng: random.Random, entry_point: str | None = None
) -> tuple[ast.Module, int, dict[str, str]]:
    taken = all_identifiers(tree)
    plan = _build_plan(tree, entry_point, _RandomNamer(rng, taken))
    sites = _apply_plan(tree, plan)
    return tree, sites, dict(plan.func_map)


def rename_sequential(
    tree: ast.Module, entry_point: str | None = None
) -> tuple[ast.Module, int, dict[str, str]]:
    taken = all_identifiers(tree)
    plan = _build_plan(tree, entry_point, _SequentialNamer(taken))
    sites = _apply_plan(tree, plan)
    return tree, sites, dict(plan.func_map)
