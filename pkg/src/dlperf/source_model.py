"""Parsing of analyzed Python files into positioned syntax trees.

Everything downstream (resolution, rules, reporting) works on the
``SourceUnit`` produced here.  Parsing never raises on bad input: a file
either yields a tree or a positioned ``ParseError`` that callers surface
as a tool notice.
"""
from __future__ import annotations

import ast
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class Span:
    """Half-open source region. Lines are 1-based, columns 0-based."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    @classmethod
    def of(cls, node: ast.AST) -> "Span":
        end_line = getattr(node, "end_lineno", None) or node.lineno
        end_col = getattr(node, "end_col_offset", None)
        if end_col is None:
            end_col = node.col_offset
        return cls(node.lineno, node.col_offset, end_line, end_col)

    def contains(self, other: "Span") -> bool:
        return (self.start_line, self.start_col) <= (other.start_line, other.start_col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)

    def as_dict(self) -> dict[str, int]:
        return {
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }


class LineIndex:
    """Byte offset <-> (line, column) conversion over the UTF-8 encoding.

    Columns count bytes within the line, matching the ``col_offset``
    convention of the ``ast`` module.
    """

    def __init__(self, text: str) -> None:
        data = text.encode("utf-8")
        starts = [0]
        for i, byte in enumerate(data):
            if byte == 0x0A:
                starts.append(i + 1)
        self._starts = starts
        self.size = len(data)

    def to_linecol(self, offset: int) -> tuple[int, int]:
        if not 0 <= offset <= self.size:
            raise ValueError(f"offset {offset} outside [0, {self.size}]")
        line = bisect_right(self._starts, offset)
        return line, offset - self._starts[line - 1]

    def to_offset(self, line: int, col: int) -> int:
        if not 1 <= line <= len(self._starts):
            raise ValueError(f"line {line} outside [1, {len(self._starts)}]")
        return self._starts[line - 1] + col


@dataclass(frozen=True, eq=False)
class SourceUnit:
    """One successfully parsed file."""

    path: str
    text: str
    tree: ast.Module
    line_index: LineIndex


@dataclass(frozen=True)
class ParseError:
    message: str
    span: Span


@dataclass(frozen=True, eq=False)
class ParseOutcome:
    """Exactly one of ``unit`` / ``error`` is set."""

    unit: SourceUnit | None = None
    error: ParseError | None = None

    def __post_init__(self) -> None:
        if (self.unit is None) == (self.error is None):
            raise ValueError("ParseOutcome needs exactly one of unit/error")


def parse_source(path: str, text: str) -> ParseOutcome:
    """Parse ``text`` into a ``SourceUnit``, or report a positioned error."""
    try:
        tree = ast.parse(text, filename=str(path))
    except SyntaxError as exc:
        line = exc.lineno or 1
        col = max((exc.offset or 1) - 1, 0)
        span = Span(line, col, line, col)
        return ParseOutcome(error=ParseError(message=exc.msg or "syntax error", span=span))
    except (ValueError, RecursionError) as exc:  # e.g. null bytes, degenerate nesting
        span = Span(1, 0, 1, 0)
        return ParseOutcome(error=ParseError(message=str(exc) or "unparseable input", span=span))
    return ParseOutcome(unit=SourceUnit(path=str(path), text=text, tree=tree, line_index=LineIndex(text)))


@dataclass(frozen=True, eq=False)
class CallSite:
    """A call expression with its pieces split out for the rules."""

    callee: ast.expr
    args: tuple[ast.expr, ...]
    keywords: tuple[tuple[str | None, ast.expr], ...]
    span: Span
    node: ast.Call

    @classmethod
    def of(cls, node: ast.Call) -> "CallSite":
        return cls(
            callee=node.func,
            args=tuple(node.args),
            keywords=tuple((kw.arg, kw.value) for kw in node.keywords),
            span=Span.of(node),
            node=node,
        )

    def keyword(self, name: str) -> ast.expr | None:
        for arg, value in self.keywords:
            if arg == name:
                return value
        return None

    def has_keyword_splat(self) -> bool:
        return any(arg is None for arg, _ in self.keywords)


@dataclass(frozen=True, eq=False)
class LoopSite:
    """A ``for`` or ``while`` loop with its body and bound targets."""

    kind: str  # "for" | "while"
    targets: tuple[str, ...]
    body: tuple[ast.stmt, ...]
    span: Span
    node: ast.stmt


_SCOPE_NODES = (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef, ast.Lambda)
_LOOP_NODES = (ast.For, ast.AsyncFor, ast.While)


def target_names(target: ast.expr) -> tuple[str, ...]:
    """Plain names bound by an assignment/loop target, unpacking included."""
    if isinstance(target, ast.Name):
        return (target.id,)
    if isinstance(target, ast.Starred):
        return target_names(target.value)
    if isinstance(target, (ast.Tuple, ast.List)):
        names: list[str] = []
        for element in target.elts:
            names.extend(target_names(element))
        return tuple(names)
    return ()


def _resolve_scope(unit: SourceUnit, scope: ast.AST | Sequence[ast.stmt] | None) -> Iterable[ast.AST]:
    if scope is None:
        return (unit.tree,)
    if isinstance(scope, ast.AST):
        return (scope,)
    return tuple(scope)


def iter_calls(unit: SourceUnit, scope: ast.AST | Sequence[ast.stmt] | None = None) -> Iterator[CallSite]:
    """Yield every call under ``scope`` (default: whole unit).

    Calls come out in lexical order with nested calls innermost-last,
    so ``f(g(x))`` yields ``g`` before ``f``.
    """

    def walk(node: ast.AST) -> Iterator[CallSite]:
        for child in ast.iter_child_nodes(node):
            yield from walk(child)
        if isinstance(node, ast.Call):
            yield CallSite.of(node)

    for root in _resolve_scope(unit, scope):
        yield from walk(root)


def loop_site(node: ast.stmt) -> LoopSite:
    """Build a ``LoopSite`` view over a raw ``for``/``while`` statement."""
    if isinstance(node, (ast.For, ast.AsyncFor)):
        kind = "for"
        targets = target_names(node.target)
    else:
        kind = "while"
        targets = ()
    return LoopSite(kind=kind, targets=targets, body=tuple(node.body), span=Span.of(node), node=node)


def iter_loops(unit: SourceUnit) -> Iterator[LoopSite]:
    """Yield every loop in the unit, outer loops before the ones they nest."""

    def walk(node: ast.AST) -> Iterator[LoopSite]:
        if isinstance(node, _LOOP_NODES):
            yield loop_site(node)
        for child in ast.iter_child_nodes(node):
            yield from walk(child)

    yield from walk(unit.tree)


def iter_scopes(tree: ast.Module) -> Iterator[tuple[ast.AST, tuple[ast.stmt, ...]]]:
    """Yield (scope node, statement body) for the module and every def/class.

    Lambdas carry no statements and are skipped.
    """
    yield tree, tuple(tree.body)

    def walk(node: ast.AST) -> Iterator[tuple[ast.AST, tuple[ast.stmt, ...]]]:
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                yield child, tuple(child.body)
            yield from walk(child)

    yield from walk(tree)


def iter_scope_statements(body: Iterable[ast.stmt]) -> Iterator[ast.stmt]:
    """Program-order statements of one scope, descending through compound
    statements but never into nested function/class bodies."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            continue
        for field_value in ast.iter_fields(stmt):
            _, value = field_value
            if isinstance(value, list):
                stmts = [v for v in value if isinstance(v, ast.stmt)]
                if stmts:
                    yield from iter_scope_statements(stmts)
                for v in value:
                    if isinstance(v, ast.excepthandler):
                        yield from iter_scope_statements(v.body)
                    elif isinstance(v, ast.match_case):
                        yield from iter_scope_statements(v.body)


def stmt_expressions(stmt: ast.stmt) -> Iterator[ast.expr]:
    """Expressions evaluated directly by ``stmt`` (headers and values),
    excluding the statement lists of compound statements."""
    for _, value in ast.iter_fields(stmt):
        if isinstance(value, ast.expr):
            yield value
        elif isinstance(value, list):
            for v in value:
                if isinstance(v, ast.expr):
                    yield v
                elif isinstance(v, ast.withitem):
                    yield v.context_expr
