"""The three performance rules.

RNC001  repeated node creation: a graph-building API called in a loop with
        no argument reading a loop-changed variable adds an identical node
        every iteration.
MOB001  map before batch: the mapped function runs per element instead of
        per batch.
DPM001  disabled parallelism: ``map``/``interleave`` without their
        parallelism keyword run serially.

Changed variables are the least fixpoint of: loop control variables,
outer names reassigned in the body, and anything assigned from an
expression that reads an already-changed name.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence

from .catalog import ApiCatalog
from .resolution import (
    AliasTable,
    DatasetState,
    FunctionEntry,
    FunctionTable,
    QualifiedName,
    build_alias_table,
    collect_constructor_bindings,
    qualify_call,
    track_datasets,
)
from .source_model import (
    CallSite,
    LoopSite,
    SourceUnit,
    Span,
    iter_scopes,
    loop_site,
    stmt_expressions,
    target_names,
)


@dataclass(frozen=True)
class RuleId:
    code: str
    taxonomy_tag: str


RNC001 = RuleId("RNC001", "Confusion with Computation Graph")
MOB001 = RuleId("MOB001", "Inefficient API Usage")
DPM001 = RuleId("DPM001", "Inefficient API Usage")

ALL_RULES: tuple[RuleId, ...] = (RNC001, MOB001, DPM001)
RULES_BY_CODE: Mapping[str, RuleId] = {r.code: r for r in ALL_RULES}

# Receiver methods treated as mutating the receiver; everything else on a
# name leaves it unchanged under the lightweight heuristic.
MUTATOR_METHODS = frozenset({"append", "extend", "update", "add"})

DEFAULT_DEPTH_LIMIT = 2

_BATCH_TAILS = frozenset({"batch", "padded_batch"})
_SCOPE_NODES = (ast.Lambda, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)


@dataclass(frozen=True)
class LoopAnalysis:
    loop: LoopSite
    changed: frozenset[str]
    defined_outside_reassigned: frozenset[str]
    control_vars: frozenset[str]


@dataclass(frozen=True)
class RawFinding:
    rule: RuleId
    span: Span
    subject: str
    detail: Mapping[str, object] = field(default_factory=dict)
    path: str = ""


def _reads(expr: ast.expr | None) -> frozenset[str]:
    if expr is None:
        return frozenset()
    return frozenset(
        n.id for n in ast.walk(expr) if isinstance(n, ast.Name) and isinstance(n.ctx, ast.Load)
    )


def _walk_no_nested_scopes(node: ast.AST) -> Iterator[ast.AST]:
    yield node
    for child in ast.iter_child_nodes(node):
        if isinstance(child, _SCOPE_NODES):
            continue
        yield from _walk_no_nested_scopes(child)


# One event per binding effect: (names written, names the new value reads).
_Event = tuple[frozenset[str], frozenset[str]]


def _target_event(target: ast.expr, value_reads: frozenset[str]) -> _Event | None:
    names = target_names(target)
    if names:
        return frozenset(names), value_reads
    if isinstance(target, (ast.Attribute, ast.Subscript)):
        inner: ast.expr = target
        while isinstance(inner, (ast.Attribute, ast.Subscript)):
            inner = inner.value
        if isinstance(inner, ast.Name):
            # mutation through attribute/subscript store marks the base and
            # depends on everything the target expression reads (base,
            # subscript indices)
            return frozenset({inner.id}), value_reads | _reads(target)
    return None


def _expression_events(stmt: ast.stmt) -> Iterator[_Event]:
    for expr in stmt_expressions(stmt):
        for node in _walk_no_nested_scopes(expr):
            if isinstance(node, ast.NamedExpr) and isinstance(node.target, ast.Name):
                yield frozenset({node.target.id}), _reads(node.value)
            elif (
                isinstance(node, ast.Call)
                and isinstance(node.func, ast.Attribute)
                and node.func.attr in MUTATOR_METHODS
                and isinstance(node.func.value, ast.Name)
            ):
                receiver = node.func.value.id
                arg_reads = frozenset()
                for arg in node.args:
                    arg_reads |= _reads(arg)
                for kw in node.keywords:
                    arg_reads |= _reads(kw.value)
                yield frozenset({receiver}), arg_reads | {receiver}


def _collect_events(body: Iterable[ast.stmt]) -> list[_Event]:
    events: list[_Event] = []

    def handle(stmt: ast.stmt) -> None:
        if isinstance(stmt, ast.Assign):
            reads = _reads(stmt.value)
            for target in stmt.targets:
                event = _target_event(target, reads)
                if event:
                    events.append(event)
        elif isinstance(stmt, ast.AugAssign):
            event = _target_event(stmt.target, _reads(stmt.value))
            if event:
                targets, reads = event
                events.append((targets, reads | targets))
        elif isinstance(stmt, ast.AnnAssign) and stmt.value is not None:
            event = _target_event(stmt.target, _reads(stmt.value))
            if event:
                events.append(event)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            names = target_names(stmt.target)
            if names:
                events.append((frozenset(names), _reads(stmt.iter)))
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                if item.optional_vars is not None:
                    names = target_names(item.optional_vars)
                    if names:
                        events.append((frozenset(names), _reads(item.context_expr)))
        elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
            bound = []
            for alias in stmt.names:
                if alias.name == "*":
                    continue
                bound.append(alias.asname or alias.name.split(".")[0])
            if bound:
                events.append((frozenset(bound), frozenset()))
        elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            events.append((frozenset({stmt.name}), frozenset()))
        events.extend(_expression_events(stmt))

    def walk(stmts: Iterable[ast.stmt]) -> None:
        for stmt in stmts:
            handle(stmt)
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue
            for _, value in ast.iter_fields(stmt):
                if isinstance(value, list):
                    nested = [v for v in value if isinstance(v, ast.stmt)]
                    if nested:
                        walk(nested)
                    for v in value:
                        if isinstance(v, ast.excepthandler):
                            if v.name:
                                events.append((frozenset({v.name}), _reads(v.type)))
                            walk(v.body)
                        elif isinstance(v, ast.match_case):
                            walk(v.body)

    walk(body)
    return events


def _closure(events: Sequence[_Event], seeds: Iterable[str]) -> frozenset[str]:
    changed = set(seeds)
    while True:
        grew = False
        for targets, reads in events:
            if targets <= changed:
                continue
            if reads & changed:
                changed |= targets
                grew = True
        if not grew:
            return frozenset(changed)


def _while_test_bindings(loop: LoopSite) -> frozenset[str]:
    # `while (chunk := read()):` rebinds chunk every iteration; treat such
    # names like control variables even though while loops have none
    if not isinstance(loop.node, ast.While):
        return frozenset()
    names: set[str] = set()
    for node in _walk_no_nested_scopes(loop.node.test):
        if isinstance(node, ast.NamedExpr) and isinstance(node.target, ast.Name):
            names.add(node.target.id)
    return frozenset(names)


def changed_vars(loop: LoopSite, enclosing_defs: Iterable[str]) -> LoopAnalysis:
    """Least fixpoint of changed names over one loop body."""
    events = _collect_events(loop.body)
    control = frozenset(loop.targets)
    assigned: set[str] = set()
    for targets, _ in events:
        assigned |= targets
    outer_reassigned = frozenset(enclosing_defs) & frozenset(assigned)
    changed = _closure(events, control | outer_reassigned | _while_test_bindings(loop))
    return LoopAnalysis(
        loop=loop,
        changed=changed,
        defined_outside_reassigned=outer_reassigned,
        control_vars=control,
    )


def _stmt_bound_names(stmt: ast.stmt) -> frozenset[str]:
    bound: set[str] = set()
    if isinstance(stmt, ast.Assign):
        for target in stmt.targets:
            bound |= set(target_names(target))
    elif isinstance(stmt, (ast.AugAssign, ast.AnnAssign)):
        bound |= set(target_names(stmt.target))
    elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
        for alias in stmt.names:
            if alias.name != "*":
                bound.add(alias.asname or alias.name.split(".")[0])
    elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        bound.add(stmt.name)
    for expr in stmt_expressions(stmt):
        for node in _walk_no_nested_scopes(expr):
            if isinstance(node, ast.NamedExpr) and isinstance(node.target, ast.Name):
                bound.add(node.target.id)
    return frozenset(bound)


def loops_with_enclosing_defs(body: Iterable[ast.stmt]) -> list[tuple[LoopSite, frozenset[str]]]:
    """Loops of one scope paired with the names bound before each, in
    program order (outer loops first)."""
    out: list[tuple[LoopSite, frozenset[str]]] = []
    bound: set[str] = set()

    def walk(stmts: Iterable[ast.stmt]) -> None:
        for stmt in stmts:
            bound.update(_stmt_bound_names(stmt))
            if isinstance(stmt, (ast.For, ast.AsyncFor, ast.While)):
                site = loop_site(stmt)
                out.append((site, frozenset(bound)))
                bound.update(site.targets)
                walk(stmt.body)
                walk(stmt.orelse)
                continue
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue
            if isinstance(stmt, (ast.With, ast.AsyncWith)):
                for item in stmt.items:
                    if item.optional_vars is not None:
                        bound.update(target_names(item.optional_vars))
            for _, value in ast.iter_fields(stmt):
                if isinstance(value, list):
                    nested = [v for v in value if isinstance(v, ast.stmt)]
                    if nested:
                        walk(nested)
                    for v in value:
                        if isinstance(v, ast.excepthandler):
                            if v.name:
                                bound.add(v.name)
                            walk(v.body)
                        elif isinstance(v, ast.match_case):
                            walk(v.body)

    walk(body)
    return out


def loop_contexts(unit: SourceUnit) -> Iterator[tuple[LoopSite, frozenset[str]]]:
    """Every loop in the unit with its enclosing-definition set."""
    for _, body in iter_scopes(unit.tree):
        yield from loops_with_enclosing_defs(body)


def _calls_no_nested_scopes(stmts: Iterable[ast.stmt]) -> Iterator[CallSite]:
    for stmt in stmts:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            # only the def-time parts of a nested definition execute here
            executed: list[ast.expr] = list(stmt.decorator_list)
            if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                executed.extend(stmt.args.defaults)
                executed.extend(d for d in stmt.args.kw_defaults if d is not None)
            else:
                executed.extend(stmt.bases)
                executed.extend(kw.value for kw in stmt.keywords)
            for expr in executed:
                for node in _walk_no_nested_scopes(expr):
                    if isinstance(node, ast.Call):
                        yield CallSite.of(node)
            continue
        for node in _walk_no_nested_scopes(stmt):
            if isinstance(node, ast.Call):
                yield CallSite.of(node)


def _arg_reads(call: CallSite) -> frozenset[str]:
    reads: frozenset[str] = frozenset()
    for arg in call.args:
        reads |= _reads(arg)
    for _, value in call.keywords:
        reads |= _reads(value)
    return reads


def _changed_param_seeds(entry: FunctionEntry, call: CallSite, caller_changed: frozenset[str]) -> frozenset[str]:
    seeds: set[str] = set()
    pos = entry.pos_params
    index = 0
    for arg in call.args:
        if isinstance(arg, ast.Starred):
            if _reads(arg.value) & caller_changed:
                seeds.update(pos[index:])
                if entry.vararg:
                    seeds.add(entry.vararg)
            index = len(pos)
            continue
        name = pos[index] if index < len(pos) else entry.vararg
        if name and _reads(arg) & caller_changed:
            seeds.add(name)
        index += 1
    for kwname, value in call.keywords:
        if kwname is None:
            if _reads(value) & caller_changed:
                seeds.update(entry.param_names)
                if entry.kwarg:
                    seeds.add(entry.kwarg)
            continue
        target = kwname if kwname in entry.param_names else entry.kwarg
        if target and _reads(value) & caller_changed:
            seeds.add(target)
    return frozenset(seeds)


class _RncScanner:
    def __init__(self, catalog: ApiCatalog, functab: FunctionTable | None) -> None:
        self.catalog = catalog
        self.functab = functab
        self.findings: list[RawFinding] = []
        self._alias_cache: dict[str, AliasTable] = {}
        self._module_binding_cache: dict[str, Mapping[str, QualifiedName]] = {}

    def _aliases_for(self, unit: SourceUnit) -> AliasTable:
        cached = self._alias_cache.get(unit.path)
        if cached is None:
            cached = build_alias_table(unit)
            self._alias_cache[unit.path] = cached
        return cached

    def _module_bindings_for(self, unit: SourceUnit, aliases: AliasTable) -> Mapping[str, QualifiedName]:
        cached = self._module_binding_cache.get(unit.path)
        if cached is None:
            cached = collect_constructor_bindings(unit.tree.body, aliases)
            self._module_binding_cache[unit.path] = cached
        return cached

    def scan(
        self,
        stmts: Sequence[ast.stmt],
        changed: frozenset[str],
        unit: SourceUnit,
        aliases: AliasTable,
        bindings: Mapping[str, QualifiedName],
        loop_span: Span,
        depth_left: int,
        visited: frozenset[str],
        callee: str | None = None,
    ) -> None:
        for call in _calls_no_nested_scopes(stmts):
            qn = qualify_call(call, aliases, bindings)
            if qn is not None and self.catalog.is_node_creating(qn):
                if not (_arg_reads(call) & changed):
                    detail: dict[str, object] = {"loop_span": loop_span}
                    if callee is not None:
                        detail["callee"] = callee
                    self.findings.append(
                        RawFinding(
                            rule=RNC001,
                            span=call.span,
                            subject=self.catalog.canonicalize(qn),
                            detail=detail,
                            path=unit.path,
                        )
                    )
            if self.functab is None or depth_left <= 0:
                continue
            entry = self.functab.lookup(call, unit, aliases)
            if entry is None or entry.qualified.dotted in visited:
                continue
            seeds = _changed_param_seeds(entry, call, changed)
            callee_changed = _closure(_collect_events(entry.body), seeds)
            callee_aliases = self._aliases_for(entry.unit)
            callee_module_bindings = self._module_bindings_for(entry.unit, callee_aliases)
            callee_bindings = collect_constructor_bindings(
                entry.body, callee_aliases, outer=callee_module_bindings
            )
            self.scan(
                entry.body,
                callee_changed,
                entry.unit,
                callee_aliases,
                callee_bindings,
                loop_span,
                depth_left - 1,
                visited | {entry.qualified.dotted},
                callee=entry.qualified.dotted,
            )


def check_repeated_node_creation(
    unit: SourceUnit,
    aliases: AliasTable,
    functab: FunctionTable | None,
    catalog: ApiCatalog,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> list[RawFinding]:
    """Flag node-creating calls in loops whose arguments avoid every
    changed variable.  Project-local callees are scanned the same way,
    down to ``depth_limit`` call levels, with changed-ness threaded
    through the bound parameters."""
    scanner = _RncScanner(catalog, functab)
    module_bindings = collect_constructor_bindings(unit.tree.body, aliases)
    for scope_node, body in iter_scopes(unit.tree):
        if scope_node is unit.tree:
            bindings: Mapping[str, QualifiedName] = module_bindings
        else:
            bindings = collect_constructor_bindings(body, aliases, outer=module_bindings)
        for site, enclosing in loops_with_enclosing_defs(body):
            analysis = changed_vars(site, enclosing)
            scanner.scan(
                site.body,
                analysis.changed,
                unit,
                aliases,
                bindings,
                loop_span=site.span,
                depth_left=depth_limit,
                visited=frozenset(),
            )
    return scanner.findings


def check_map_before_batch(states: list[DatasetState]) -> list[RawFinding]:
    """Flag each ``map`` that still has a ``batch`` ahead of it and none
    behind it; one finding per (map, nearest following batch) pair."""
    findings: list[RawFinding] = []
    seen: set[tuple[Span, Span]] = set()
    for state in states:
        batch_positions = [i for i, (tail, _) in enumerate(state.history) if tail in _BATCH_TAILS]
        for i, (tail, site) in enumerate(state.history):
            if tail != "map":
                continue
            if any(b < i for b in batch_positions):
                continue
            following = [b for b in batch_positions if b > i]
            if not following:
                continue
            batch_site = state.history[following[0]][1]
            key = (site.span, batch_site.span)
            if key in seen:
                continue
            seen.add(key)
            findings.append(
                RawFinding(
                    rule=MOB001,
                    span=site.span,
                    subject="map",
                    detail={"batch_span": batch_site.span, "pipeline": state.name},
                )
            )
    return findings


def check_missing_parallelism(states: list[DatasetState], catalog: ApiCatalog) -> list[RawFinding]:
    """Flag parallelizable transformer calls missing their parallelism
    keyword.  Any explicit value counts as set; a ``**kwargs`` splat may
    set it, so those calls stay silent."""
    findings: list[RawFinding] = []
    seen: set[tuple[Span, str]] = set()
    for state in states:
        for tail, site in state.history:
            keyword = catalog.parallelism_keyword(tail)
            if keyword is None:
                continue
            if site.keyword(keyword) is not None or site.has_keyword_splat():
                continue
            key = (site.span, tail)
            if key in seen:
                continue
            seen.add(key)
            findings.append(
                RawFinding(
                    rule=DPM001,
                    span=site.span,
                    subject=tail,
                    detail={"keyword": keyword, "pipeline": state.name},
                )
            )
    return findings


def _normalize_enabled(enabled: Iterable[RuleId | str] | None) -> frozenset[str]:
    if enabled is None:
        return frozenset(RULES_BY_CODE)
    codes: set[str] = set()
    for rule in enabled:
        code = rule.code if isinstance(rule, RuleId) else rule
        if code not in RULES_BY_CODE:
            raise ValueError(f"unknown rule code: {code}")
        codes.add(code)
    return frozenset(codes)


def run_rules(
    units: Sequence[SourceUnit],
    aliases_by_path: Mapping[str, AliasTable],
    functab: FunctionTable | None,
    catalog: ApiCatalog,
    enabled: Iterable[RuleId | str] | None = None,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> list[RawFinding]:
    """Union of the enabled rules over all units, deduplicated by
    (rule, path, span, subject) and sorted by position."""
    codes = _normalize_enabled(enabled)
    raw: list[RawFinding] = []
    for unit in sorted(units, key=lambda u: u.path):
        aliases = aliases_by_path[unit.path]
        if RNC001.code in codes:
            raw.extend(check_repeated_node_creation(unit, aliases, functab, catalog, depth_limit))
        if MOB001.code in codes or DPM001.code in codes:
            states = track_datasets(unit, aliases, catalog, functab)
            if MOB001.code in codes:
                raw.extend(replace(f, path=unit.path) for f in check_map_before_batch(states))
            if DPM001.code in codes:
                raw.extend(replace(f, path=unit.path) for f in check_missing_parallelism(states, catalog))
    raw.sort(key=lambda f: (f.path, f.span.start_line, f.span.start_col, f.rule.code))
    out: list[RawFinding] = []
    seen: set[tuple[str, str, Span, str]] = set()
    for finding in raw:
        key = (finding.rule.code, finding.path, finding.span, finding.subject)
        if key in seen:
            continue
        seen.add(key)
        out.append(finding)
    return out
