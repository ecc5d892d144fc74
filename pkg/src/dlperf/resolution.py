"""Lightweight name resolution over parsed units.

Resolution is deliberately shallow and silent: a call either resolves to
a dotted qualified name justified by an import, alias, or tracked binding,
or it resolves to nothing.  Rules never fire on guesses.
"""
from __future__ import annotations

import ast
import weakref
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping

from .source_model import (
    CallSite,
    SourceUnit,
    Span,
    iter_scope_statements,
    iter_scopes,
    stmt_expressions,
)

if TYPE_CHECKING:
    from .catalog import ApiCatalog

# Attribute chains longer than this are never resolved; catalog entries
# stay within four dotted segments.
MAX_ATTR_HOPS = 4


@dataclass(frozen=True)
class QualifiedName:
    """Dotted API identity after alias resolution, e.g. ``tensorflow.matmul``."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments or any(not s for s in self.segments):
            raise ValueError(f"invalid qualified name segments: {self.segments!r}")

    @classmethod
    def from_dotted(cls, dotted: str) -> "QualifiedName":
        return cls(tuple(dotted.split(".")))

    @property
    def dotted(self) -> str:
        return ".".join(self.segments)

    def child(self, *extra: str) -> "QualifiedName":
        return QualifiedName(self.segments + extra)

    def __str__(self) -> str:
        return self.dotted


@dataclass(frozen=True)
class AliasTable:
    """Local name -> dotted prefix, merged over the whole unit.

    Wildcard imports are kept as opaque markers: names they may introduce
    are never resolved through them.
    """

    names: Mapping[str, str]
    wildcard_modules: tuple[str, ...] = ()

    def prefix_for(self, name: str) -> str | None:
        return self.names.get(name)


def build_alias_table(unit: SourceUnit) -> AliasTable:
    """Collect import aliases from the whole unit into one flat table.

    Module-level imports come first, then nested scopes, so an alias
    imported inside a function overrides a module-level clash.
    """
    names: dict[str, str] = {}
    wildcards: list[str] = []
    for node in ast.walk(unit.tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                if alias.asname:
                    names[alias.asname] = alias.name
                else:
                    head = alias.name.split(".")[0]
                    names[head] = head
        elif isinstance(node, ast.ImportFrom):
            module = node.module or ""
            for alias in node.names:
                if alias.name == "*":
                    if module:
                        wildcards.append(module)
                    continue
                local = alias.asname or alias.name
                names[local] = f"{module}.{alias.name}" if module else alias.name
    return AliasTable(names=names, wildcard_modules=tuple(wildcards))


def _attribute_chain(expr: ast.expr, hops: int = 0) -> tuple[str, tuple[str, ...]] | tuple[None, None]:
    """Unwind ``base.a.b.c`` to (base name, attrs). Chains through a call
    result keep resolving via the call's own callee (``Cls(...).method``)."""
    attrs: list[str] = []
    cur: ast.expr = expr
    while isinstance(cur, ast.Attribute):
        attrs.append(cur.attr)
        cur = cur.value
        if len(attrs) + hops > MAX_ATTR_HOPS:
            return None, None
    attrs.reverse()
    if isinstance(cur, ast.Name):
        return cur.id, tuple(attrs)
    if isinstance(cur, ast.Call) and attrs:
        inner = _attribute_chain(cur.func, hops=hops + len(attrs))
        if inner[0] is not None:
            base, inner_attrs = inner
            return base, inner_attrs + tuple(attrs)
    return None, None


def qualify_call(
    call: CallSite,
    aliases: AliasTable,
    local_bindings: Mapping[str, QualifiedName] | None = None,
) -> QualifiedName | None:
    """Resolve a call's callee to a dotted qualified name, or to nothing.

    Resolution goes through import aliases or through one-step constructor
    bindings (``opt = tf.train.GradientDescentOptimizer(0.1)`` lets
    ``opt.minimize`` resolve through the optimizer class).
    """
    base, attrs = _attribute_chain(call.callee)
    if base is None:
        return None
    if local_bindings and base in local_bindings:
        if not attrs:
            return None  # calling the instance itself is not an API name
        return local_bindings[base].child(*attrs)
    prefix = aliases.prefix_for(base)
    if prefix is None:
        return None
    return QualifiedName.from_dotted(prefix).child(*attrs) if attrs else QualifiedName.from_dotted(prefix)


def _resolve_via_aliases(expr: ast.expr, aliases: AliasTable) -> QualifiedName | None:
    base, attrs = _attribute_chain(expr)
    if base is None:
        return None
    prefix = aliases.prefix_for(base)
    if prefix is None:
        return None
    qn = QualifiedName.from_dotted(prefix)
    return qn.child(*attrs) if attrs else qn


def collect_constructor_bindings(
    body: Iterable[ast.stmt],
    aliases: AliasTable,
    outer: Mapping[str, QualifiedName] | None = None,
) -> dict[str, QualifiedName]:
    """One-step constructor heuristic: record names assigned from a call to
    a class-looking resolvable callee.  Only aliases feed the resolution,
    so bindings never chain through each other."""
    bindings: dict[str, QualifiedName] = dict(outer or {})

    def record(name: str, value: ast.expr) -> None:
        if not isinstance(value, ast.Call):
            return
        qn = _resolve_via_aliases(value.func, aliases)
        if qn is not None and qn.segments[-1][:1].isupper():
            bindings[name] = qn

    for stmt in iter_scope_statements(body):
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 and isinstance(stmt.targets[0], ast.Name):
            record(stmt.targets[0].id, stmt.value)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                if isinstance(item.optional_vars, ast.Name):
                    record(item.optional_vars.id, item.context_expr)
    return bindings


@dataclass(frozen=True, eq=False)
class FunctionEntry:
    qualified: QualifiedName
    pos_params: tuple[str, ...]
    kwonly_params: tuple[str, ...]
    vararg: str | None
    kwarg: str | None
    body: tuple[ast.stmt, ...]
    unit: SourceUnit

    @property
    def param_names(self) -> tuple[str, ...]:
        return self.pos_params + self.kwonly_params


def _entry_for(node: ast.FunctionDef | ast.AsyncFunctionDef, qualified: QualifiedName, unit: SourceUnit) -> FunctionEntry:
    a = node.args
    pos = tuple(p.arg for p in a.posonlyargs + a.args)
    return FunctionEntry(
        qualified=qualified,
        pos_params=pos,
        kwonly_params=tuple(p.arg for p in a.kwonlyargs),
        vararg=a.vararg.arg if a.vararg else None,
        kwarg=a.kwarg.arg if a.kwarg else None,
        body=tuple(node.body),
        unit=unit,
    )


@dataclass(frozen=True)
class FunctionTable:
    """Project-local function definitions, indexed for call-site lookup."""

    by_qualified: Mapping[str, FunctionEntry]
    by_simple: Mapping[tuple[str, str], FunctionEntry]

    def lookup(self, call: CallSite, unit: SourceUnit, aliases: AliasTable) -> FunctionEntry | None:
        if isinstance(call.callee, ast.Name):
            entry = self.by_simple.get((unit.path, call.callee.id))
            if entry is not None:
                return entry
            prefix = aliases.prefix_for(call.callee.id)
            if prefix is not None:
                return self.by_qualified.get(prefix)
            return None
        base, attrs = _attribute_chain(call.callee)
        if base is None or not attrs:
            return None
        prefix = aliases.prefix_for(base)
        if prefix is None:
            return None
        return self.by_qualified.get(".".join((*prefix.split("."), *attrs)))


def _module_name(path: str) -> str:
    return Path(path).stem


def build_function_table(units: Iterable[SourceUnit]) -> FunctionTable:
    """Index project function definitions; shadowed redefinitions keep the last.

    Top-level functions and methods get module-qualified names; plain
    functions (top-level or nested) are also reachable by simple name
    within their own file.
    """
    by_qualified: dict[str, FunctionEntry] = {}
    by_simple: dict[tuple[str, str], FunctionEntry] = {}

    def index_nested(node: ast.AST, unit: SourceUnit, module: str) -> None:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                entry = _entry_for(child, QualifiedName((module, child.name)), unit)
                by_simple[(unit.path, child.name)] = entry
            index_nested(child, unit, module)

    for unit in sorted(units, key=lambda u: u.path):
        module = _module_name(unit.path)
        for stmt in unit.tree.body:
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                entry = _entry_for(stmt, QualifiedName((module, stmt.name)), unit)
                by_qualified[entry.qualified.dotted] = entry
                by_simple[(unit.path, stmt.name)] = entry
                index_nested(stmt, unit, module)
            elif isinstance(stmt, ast.ClassDef):
                for member in stmt.body:
                    if isinstance(member, (ast.FunctionDef, ast.AsyncFunctionDef)):
                        entry = _entry_for(member, QualifiedName((module, stmt.name, member.name)), unit)
                        by_qualified[entry.qualified.dotted] = entry
                        index_nested(member, unit, module)
            else:
                index_nested(stmt, unit, module)
    return FunctionTable(by_qualified=by_qualified, by_simple=by_simple)


@dataclass(eq=False)
class DatasetState:
    """Provenance of one dataset pipeline inside a single scope."""

    name: str
    origin: CallSite
    history: list[tuple[str, CallSite]] = field(default_factory=list)


def _expr_id(span: Span) -> str:
    return f"<pipeline@{span.start_line}:{span.start_col}>"


def _unwind_pipeline(call: ast.Call, transformers: frozenset[str]) -> tuple[ast.expr, list[ast.Call]]:
    calls: list[ast.Call] = []
    cur: ast.expr = call
    while (
        isinstance(cur, ast.Call)
        and isinstance(cur.func, ast.Attribute)
        and cur.func.attr in transformers
    ):
        calls.append(cur)
        cur = cur.func.value
    calls.reverse()
    return cur, calls


def _collect_pipeline_chains(
    root: ast.expr, transformers: frozenset[str]
) -> list[tuple[ast.expr, list[ast.Call]]]:
    """Maximal transformer chains under ``root``, in source order.  Chains
    inside lambdas or nested defs belong to other scopes and are skipped."""
    chains: list[tuple[ast.expr, list[ast.Call]]] = []

    def visit(node: ast.AST) -> None:
        if isinstance(node, (ast.Lambda, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            return
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Attribute)
            and node.func.attr in transformers
        ):
            base, calls = _unwind_pipeline(node, transformers)
            chains.append((base, calls))
            visit(base)
            for c in calls:
                for arg in c.args:
                    visit(arg)
                for kw in c.keywords:
                    visit(kw.value)
            return
        for child in ast.iter_child_nodes(node):
            visit(child)

    visit(root)
    return chains


class _ScopeTracker:
    def __init__(
        self,
        unit: SourceUnit,
        aliases: AliasTable,
        catalog: "ApiCatalog",
        functab: FunctionTable | None,
        allow_redetect: bool,
    ) -> None:
        self.unit = unit
        self.aliases = aliases
        self.catalog = catalog
        self.functab = functab
        self.allow_redetect = allow_redetect
        self.states: list[DatasetState] = []
        self.tracked: dict[str, DatasetState] = {}

    def _is_constructor(self, call: ast.expr) -> bool:
        if not isinstance(call, ast.Call):
            return False
        qn = _resolve_via_aliases(call.func, self.aliases)
        return qn is not None and self.catalog.is_dataset_constructor(qn)

    def _returns_dataset_call(self, call: ast.expr) -> bool:
        """One level deep: the callee is a known project function whose
        return expression is itself a tracked dataset."""
        if not (self.allow_redetect and self.functab and isinstance(call, ast.Call)):
            return False
        site = CallSite.of(call)
        entry = self.functab.lookup(site, self.unit, self.aliases)
        if entry is None:
            return False
        return _function_returns_dataset(entry, self.catalog)

    def _new_state(self, name: str, origin_call: ast.Call, entries: list[tuple[str, CallSite]]) -> DatasetState:
        state = DatasetState(name=name, origin=CallSite.of(origin_call), history=list(entries))
        self.states.append(state)
        return state

    def _entries(self, calls: list[ast.Call]) -> list[tuple[str, CallSite]]:
        out = []
        for c in calls:
            assert isinstance(c.func, ast.Attribute)
            out.append((c.func.attr, CallSite.of(c)))
        return out

    def _apply_chain(self, base: ast.expr, calls: list[ast.Call], bind_to: str | None) -> None:
        entries = self._entries(calls)
        if isinstance(base, ast.Name) and base.id in self.tracked:
            src = self.tracked[base.id]
            if bind_to is None or bind_to == base.id:
                src.history.extend(entries)
            else:
                branched = DatasetState(
                    name=bind_to, origin=src.origin, history=list(src.history) + entries
                )
                self.states.append(branched)
                self.tracked[bind_to] = branched
            return
        if isinstance(base, ast.Call) and (self._is_constructor(base) or self._returns_dataset_call(base)):
            name = bind_to if bind_to is not None else _expr_id(Span.of(base))
            state = self._new_state(name, base, entries)
            if bind_to is not None:
                self.tracked[bind_to] = state
            return
        if bind_to is not None:
            self.tracked.pop(bind_to, None)

    def run(self, body: Iterable[ast.stmt]) -> None:
        transformers = self.catalog.dataset_transformers
        for stmt in iter_scope_statements(body):
            bind_target: str | None = None
            bind_value: ast.expr | None = None
            if (
                isinstance(stmt, ast.Assign)
                and len(stmt.targets) == 1
                and isinstance(stmt.targets[0], ast.Name)
            ):
                bind_target = stmt.targets[0].id
                bind_value = stmt.value

            handled_assignment = False
            for expr in stmt_expressions(stmt):
                for base, calls in _collect_pipeline_chains(expr, transformers):
                    outermost = calls[-1] if calls else None
                    if bind_target is not None and outermost is bind_value:
                        self._apply_chain(base, calls, bind_to=bind_target)
                        handled_assignment = True
                    else:
                        self._apply_chain(base, calls, bind_to=None)

            if bind_target is not None and not handled_assignment:
                assert bind_value is not None
                if isinstance(bind_value, ast.Call) and self._is_constructor(bind_value):
                    self.tracked[bind_target] = self._new_state(bind_target, bind_value, [])
                elif isinstance(bind_value, ast.Call) and self._returns_dataset_call(bind_value):
                    self.tracked[bind_target] = self._new_state(bind_target, bind_value, [])
                else:
                    # reassigned to something that is not a dataset
                    self.tracked.pop(bind_target, None)


_RETURNS_DATASET_CACHE: "weakref.WeakKeyDictionary[FunctionEntry, bool]" = weakref.WeakKeyDictionary()


def _function_returns_dataset(entry: FunctionEntry, catalog: "ApiCatalog") -> bool:
    cached = _RETURNS_DATASET_CACHE.get(entry)
    if cached is not None:
        return cached
    aliases = build_alias_table(entry.unit)
    tracker = _ScopeTracker(entry.unit, aliases, catalog, functab=None, allow_redetect=False)
    tracker.run(entry.body)
    result = False
    for stmt in iter_scope_statements(entry.body):
        if not isinstance(stmt, ast.Return) or stmt.value is None:
            continue
        value = stmt.value
        if isinstance(value, ast.Name) and value.id in tracker.tracked:
            result = True
            break
        if isinstance(value, ast.Call):
            base, calls = _unwind_pipeline(value, catalog.dataset_transformers)
            if calls and (
                (isinstance(base, ast.Name) and base.id in tracker.tracked)
                or tracker._is_constructor(base)
            ):
                result = True
                break
            if tracker._is_constructor(value):
                result = True
                break
    _RETURNS_DATASET_CACHE[entry] = result
    return result


def track_datasets(
    unit: SourceUnit,
    aliases: AliasTable,
    catalog: "ApiCatalog",
    functab: FunctionTable | None = None,
) -> list[DatasetState]:
    """Trace dataset pipelines per scope: construction, rebinding, and
    chained transformer calls, in program order.

    A bare method name on an unresolved receiver never starts tracking.
    Datasets returned by project functions are re-detected at the caller
    with fresh history, one call level deep.
    """
    states: list[DatasetState] = []
    for _, body in iter_scopes(unit.tree):
        tracker = _ScopeTracker(unit, aliases, catalog, functab, allow_redetect=True)
        tracker.run(body)
        states.extend(tracker.states)
    return states
