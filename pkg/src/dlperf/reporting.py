"""Turn raw findings into user-facing diagnostics.

Suppression markers, message templating with fix hints, and byte-stable
text/JSON renderers.  The JSON layout is versioned and documented in
``docs/diagnostics-schema.md``.
"""
from __future__ import annotations

import io
import json
import re
import tokenize
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .checkers import RULES_BY_CODE, RawFinding
from .source_model import SourceUnit, Span

JSON_SCHEMA_VERSION = "1"

SEVERITIES = ("warning", "error")

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_TOOL_ERROR = 2

# all rules suppressed when the marker carries no code list
_SUPPRESS_ALL = "*"

_MARKER_RE = re.compile(r"^dlperf:\s*ignore(?:\[(?P<codes>[^\]]*)\])?\s*$")
_MARKER_PREFIX_RE = re.compile(r"^dlperf:")


@dataclass(frozen=True)
class Notice:
    """A tool-level remark (parse failure, malformed marker); never a finding."""

    path: str
    line: int
    message: str


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    path: str
    span: Span
    message: str
    fix_hint: str
    taxonomy_tag: str
    suppressed: bool = False


@dataclass(frozen=True)
class RunSummary:
    files_scanned: int
    files_with_notices: int
    findings_per_rule: Mapping[str, int]
    exit_code: int
    notices: tuple[Notice, ...] = ()  # surfaced on stderr, not part of the JSON schema


def _message_for(finding: RawFinding) -> str:
    code = finding.rule.code
    subject = finding.subject
    if code == "RNC001":
        return (
            f"graph-building call '{subject}' uses no loop-changed variable; "
            "every iteration adds an identical node to the computation graph"
        )
    if code == "MOB001":
        return (
            f"'{subject}' is applied before 'batch' on this pipeline, so the "
            "mapped function runs once per element instead of once per batch"
        )
    if code == "DPM001":
        keyword = finding.detail.get("keyword", "num_parallel_calls")
        return f"'{subject}' is called without '{keyword}', so elements are processed serially"
    raise ValueError(f"no message template for rule {code}")


def _hint_for(finding: RawFinding) -> str:
    code = finding.rule.code
    if code == "RNC001":
        return f"hoist '{finding.subject}' out of the loop: build the graph once and reuse the result inside"
    if code == "MOB001":
        return "call 'batch' before 'map' and vectorize the mapped function to work on whole batches"
    keyword = finding.detail.get("keyword", "num_parallel_calls")
    return f"pass {keyword} (e.g. tf.data.AUTOTUNE) to '{finding.subject}' to enable parallelism"


def _suppression_markers(
    unit: SourceUnit, notices: list[Notice] | None
) -> dict[int, frozenset[str] | str]:
    """line -> suppressed codes for that line, or the suppress-all marker."""
    markers: dict[int, frozenset[str] | str] = {}
    try:
        tokens = tokenize.generate_tokens(io.StringIO(unit.text).readline)
        comments = [(t.start[0], t.string) for t in tokens if t.type == tokenize.COMMENT]
    except (tokenize.TokenError, IndentationError):  # parsed units always tokenize
        return markers
    for line, comment in comments:
        text = comment.lstrip("#").strip()
        if not _MARKER_PREFIX_RE.match(text):
            continue
        match = _MARKER_RE.match(text)
        if match is None:
            if notices is not None:
                notices.append(Notice(unit.path, line, f"malformed suppression marker: {comment.strip()!r}"))
            continue
        raw_codes = match.group("codes")
        if raw_codes is None:
            markers[line] = _SUPPRESS_ALL
            continue
        codes = [c.strip() for c in raw_codes.split(",") if c.strip()]
        unknown = [c for c in codes if c not in RULES_BY_CODE]
        if not codes or unknown:
            if notices is not None:
                detail = f"unknown rule codes {unknown}" if unknown else "empty code list"
                notices.append(Notice(unit.path, line, f"suppression marker ignored ({detail}): {comment.strip()!r}"))
            continue
        existing = markers.get(line)
        if existing == _SUPPRESS_ALL:
            continue
        merged = set(existing or frozenset()) | set(codes)
        markers[line] = frozenset(merged)
    return markers


def _is_suppressed(code: str, line: int, markers: Mapping[int, frozenset[str] | str]) -> bool:
    for candidate in (line, line - 1):
        marker = markers.get(candidate)
        if marker is None:
            continue
        if marker == _SUPPRESS_ALL or code in marker:
            return True
    return False


def apply_suppressions(
    findings: Sequence[RawFinding],
    units: Iterable[SourceUnit],
    notices: list[Notice] | None = None,
    severities: Mapping[str, str] | None = None,
) -> list[Diagnostic]:
    """Render findings into diagnostics, marking the suppressed ones.

    A finding is suppressed when its start line, or the line just above,
    carries ``# dlperf: ignore`` or ``# dlperf: ignore[CODE,...]`` naming
    its code.  Malformed markers never suppress; they add a notice.
    """
    markers_by_path: dict[str, Mapping[int, frozenset[str] | str]] = {}
    for unit in units:
        markers_by_path[unit.path] = _suppression_markers(unit, notices)
    out: list[Diagnostic] = []
    for finding in findings:
        code = finding.rule.code
        markers = markers_by_path.get(finding.path, {})
        severity = (severities or {}).get(code, "warning")
        out.append(
            Diagnostic(
                code=code,
                severity=severity,
                path=finding.path,
                span=finding.span,
                message=_message_for(finding),
                fix_hint=_hint_for(finding),
                taxonomy_tag=finding.rule.taxonomy_tag,
                suppressed=_is_suppressed(code, finding.span.start_line, markers),
            )
        )
    return out


def summarize(
    diags: Sequence[Diagnostic],
    files_scanned: int,
    notices: Sequence[Notice] = (),
    rule_codes: Iterable[str] | None = None,
) -> RunSummary:
    codes = sorted(rule_codes if rule_codes is not None else RULES_BY_CODE)
    counts = {code: 0 for code in codes}
    for diag in diags:
        if diag.suppressed:
            continue
        counts[diag.code] = counts.get(diag.code, 0) + 1
    emitted = sum(counts.values())
    return RunSummary(
        files_scanned=files_scanned,
        files_with_notices=len({n.path for n in notices}),
        findings_per_rule=counts,
        exit_code=EXIT_FINDINGS if emitted else EXIT_CLEAN,
        notices=tuple(notices),
    )


def _visible(diags: Sequence[Diagnostic], show_suppressed: bool) -> list[Diagnostic]:
    if show_suppressed:
        return list(diags)
    return [d for d in diags if not d.suppressed]


def render_text(diags: Sequence[Diagnostic], summary: RunSummary, show_suppressed: bool = False) -> str:
    lines: list[str] = []
    suppressed_count = sum(1 for d in diags if d.suppressed)
    for diag in _visible(diags, show_suppressed):
        marker = " (suppressed)" if diag.suppressed else ""
        lines.append(
            f"{diag.path}:{diag.span.start_line}:{diag.span.start_col}: {diag.code} {diag.message}{marker}"
        )
        lines.append(f"    hint: {diag.fix_hint}")
    lines.append(f"files scanned: {summary.files_scanned} ({summary.files_with_notices} with notices)")
    per_rule = " ".join(f"{code}={count}" for code, count in sorted(summary.findings_per_rule.items()))
    lines.append(f"findings: {per_rule if per_rule else 'none'}")
    if show_suppressed:
        lines.append(f"suppressed: {suppressed_count}")
    return "\n".join(lines) + "\n"


def render_json(diags: Sequence[Diagnostic], summary: RunSummary, show_suppressed: bool = False) -> str:
    payload = {
        "version": JSON_SCHEMA_VERSION,
        "diagnostics": [
            {
                "code": d.code,
                "severity": d.severity,
                "path": d.path,
                "span": d.span.as_dict(),
                "message": d.message,
                "fix_hint": d.fix_hint,
                "taxonomy_tag": d.taxonomy_tag,
                "suppressed": d.suppressed,
            }
            for d in _visible(diags, show_suppressed)
        ],
        "summary": {
            "files_scanned": summary.files_scanned,
            "files_with_notices": summary.files_with_notices,
            "findings_per_rule": dict(summary.findings_per_rule),
            "exit_code": summary.exit_code,
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def exit_code(summary: RunSummary) -> int:
    return summary.exit_code
