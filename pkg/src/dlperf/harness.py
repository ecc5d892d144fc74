"""File discovery, the full check pipeline, and the corpus harness.

The corpus harness diffs findings against ``# expect: CODE`` annotations
embedded in the corpus files and reports matched / missing / unexpected,
plus per-rule and per-project detection counts.
"""
from __future__ import annotations

import io
import json
import os
import re
import tokenize
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .catalog import ApiCatalog, load_catalog
from .checkers import DEFAULT_DEPTH_LIMIT, RULES_BY_CODE, RawFinding, run_rules
from .reporting import (
    EXIT_CLEAN,
    EXIT_FINDINGS,
    SEVERITIES,
    Diagnostic,
    Notice,
    RunSummary,
    apply_suppressions,
    summarize,
)
from .resolution import AliasTable, build_alias_table, build_function_table
from .source_model import SourceUnit, parse_source


class ConfigError(Exception):
    """Bad configuration; treated as a tool error (exit code 2)."""


_CONFIG_KEYS = {
    "rules",
    "catalog",
    "depth_limit",
    "format",
    "show_suppressed",
    "include",
    "exclude",
    "jobs",
    "severity",
}


@dataclass(frozen=True)
class Config:
    rules: tuple[str, ...] = tuple(sorted(RULES_BY_CODE))
    catalog_path: str | None = None
    depth_limit: int = DEFAULT_DEPTH_LIMIT
    format: str = "text"
    show_suppressed: bool = False
    include: tuple[str, ...] = ()
    exclude: tuple[str, ...] = ()
    jobs: int = 1
    severity: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for code in self.rules:
            if code not in RULES_BY_CODE:
                raise ConfigError(f"unknown rule code: {code}")
        if self.depth_limit < 0:
            raise ConfigError(f"depth_limit must be >= 0, got {self.depth_limit}")
        if self.format not in ("text", "json"):
            raise ConfigError(f"format must be 'text' or 'json', got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        for code, severity in self.severity.items():
            if code not in RULES_BY_CODE:
                raise ConfigError(f"severity: unknown rule code: {code}")
            if severity not in SEVERITIES:
                raise ConfigError(f"severity: {severity!r} is not one of {SEVERITIES}")


def load_config(path: str | Path) -> Config:
    """Read a JSON config file; unknown keys are rejected."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    kwargs: dict[str, object] = {}
    if "rules" in data:
        kwargs["rules"] = tuple(data["rules"])
    if "catalog" in data:
        kwargs["catalog_path"] = data["catalog"]
    if "depth_limit" in data:
        kwargs["depth_limit"] = int(data["depth_limit"])
    if "format" in data:
        kwargs["format"] = data["format"]
    if "show_suppressed" in data:
        kwargs["show_suppressed"] = bool(data["show_suppressed"])
    if "include" in data:
        kwargs["include"] = tuple(data["include"])
    if "exclude" in data:
        kwargs["exclude"] = tuple(data["exclude"])
    if "jobs" in data:
        kwargs["jobs"] = int(data["jobs"])
    if "severity" in data:
        kwargs["severity"] = dict(data["severity"])
    return Config(**kwargs)  # type: ignore[arg-type]


def _glob_to_regex(pattern: str) -> re.Pattern[str]:
    out = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch == "*":
            if pattern[i : i + 2] == "**":
                out.append(".*")
                i += 2
                continue
            out.append("[^/]*")
        elif ch == "?":
            out.append("[^/]")
        else:
            out.append(re.escape(ch))
        i += 1
    return re.compile("^" + "".join(out) + "$")


def _matches(path: str, pattern: str) -> bool:
    regex = _glob_to_regex(pattern)
    posix = path.replace(os.sep, "/")
    if regex.match(posix):
        return True
    # a bare pattern without separators also matches the file name
    return "/" not in pattern and regex.match(posix.rsplit("/", 1)[-1]) is not None


def discover_files(roots: Sequence[str | Path], config: Config) -> list[str]:
    """Recursively collect ``.py`` files under the roots, apply the
    include/exclude globs, and return path-sorted strings.  Symlink cycles
    are broken with a visited set of real paths."""
    found: set[str] = set()
    for root in roots:
        root_path = Path(root)
        if root_path.is_file():
            if root_path.suffix == ".py":
                found.add(str(root_path))
            continue
        if not root_path.is_dir():
            raise ConfigError(f"path does not exist: {root_path}")
        visited: set[str] = set()
        for dirpath, dirnames, filenames in os.walk(root_path, followlinks=True):
            real = os.path.realpath(dirpath)
            if real in visited:
                dirnames[:] = []
                continue
            visited.add(real)
            dirnames.sort()
            for name in sorted(filenames):
                if name.endswith(".py"):
                    found.add(os.path.join(dirpath, name))

    def keep(path: str) -> bool:
        if config.include and not any(_matches(path, p) for p in config.include):
            return False
        return not any(_matches(path, p) for p in config.exclude)

    return sorted(p for p in found if keep(p))


def _parse_one(path: str) -> tuple[str, SourceUnit | None, Notice | None, AliasTable | None]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return path, None, Notice(path, 1, f"cannot read file: {exc}"), None
    outcome = parse_source(path, text)
    if outcome.error is not None:
        notice = Notice(path, outcome.error.span.start_line, f"parse error: {outcome.error.message}")
        return path, None, notice, None
    assert outcome.unit is not None
    return path, outcome.unit, None, build_alias_table(outcome.unit)


def _map_jobs(fn, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True, eq=False)
class _CheckState:
    files: list[str]
    units: list[SourceUnit]
    aliases: dict[str, AliasTable]
    findings: list[RawFinding]
    diags: list[Diagnostic]
    summary: RunSummary


def _run_pipeline(roots: Sequence[str | Path], config: Config, catalog: ApiCatalog | None = None) -> _CheckState:
    if catalog is None:
        catalog = load_catalog(config.catalog_path)
    files = discover_files(roots, config)
    notices: list[Notice] = []
    units: list[SourceUnit] = []
    aliases: dict[str, AliasTable] = {}
    for path, unit, notice, alias_table in _map_jobs(_parse_one, files, config.jobs):
        if notice is not None:
            notices.append(notice)
        if unit is not None:
            units.append(unit)
            aliases[path] = alias_table
    units.sort(key=lambda u: u.path)
    functab = build_function_table(units)

    def rules_for(unit: SourceUnit) -> list[RawFinding]:
        return run_rules([unit], aliases, functab, catalog, config.rules, config.depth_limit)

    merged: list[RawFinding] = []
    for chunk in _map_jobs(rules_for, units, config.jobs):
        merged.extend(chunk)
    merged.sort(key=lambda f: (f.path, f.span.start_line, f.span.start_col, f.rule.code))
    deduped: list[RawFinding] = []
    seen = set()
    for finding in merged:
        key = (finding.rule.code, finding.path, finding.span, finding.subject)
        if key in seen:
            continue
        seen.add(key)
        deduped.append(finding)

    diags = apply_suppressions(deduped, units, notices, severities=config.severity)
    summary = summarize(diags, files_scanned=len(files), notices=notices, rule_codes=config.rules)
    return _CheckState(files=files, units=units, aliases=aliases, findings=deduped, diags=diags, summary=summary)


def run_check(roots: Sequence[str | Path], config: Config | None = None) -> tuple[list[Diagnostic], RunSummary]:
    """Full pipeline: discover, parse, resolve, run rules, suppress, summarize."""
    state = _run_pipeline(roots, config or Config())
    return state.diags, state.summary


@dataclass(frozen=True, order=True)
class Expectation:
    path: str
    line: int
    code: str


_EXPECT_RE = re.compile(r"^expect:\s*(?P<codes>[A-Za-z0-9_]+(?:\s*,\s*[A-Za-z0-9_]+)*)\s*$")


def parse_expectations(unit: SourceUnit, notices: list[Notice] | None = None) -> list[Expectation]:
    """Collect ``# expect: CODE(,CODE)*`` annotations, one per code."""
    out: list[Expectation] = []
    try:
        tokens = tokenize.generate_tokens(io.StringIO(unit.text).readline)
        comments = [(t.start[0], t.string) for t in tokens if t.type == tokenize.COMMENT]
    except (tokenize.TokenError, IndentationError):
        return out
    for line, comment in comments:
        text = comment.lstrip("#").strip()
        if not text.startswith("expect:"):
            continue
        match = _EXPECT_RE.match(text)
        if match is None:
            if notices is not None:
                notices.append(Notice(unit.path, line, f"malformed expectation: {comment.strip()!r}"))
            continue
        for code in (c.strip() for c in match.group("codes").split(",")):
            if code not in RULES_BY_CODE and notices is not None:
                notices.append(Notice(unit.path, line, f"expectation names unknown rule {code!r}"))
            out.append(Expectation(path=unit.path, line=line, code=code))
    return out


@dataclass(frozen=True)
class CorpusReport:
    total_expected: int
    matched: int
    missing: tuple[Expectation, ...]
    unexpected: tuple[Expectation, ...]
    per_rule: Mapping[str, Mapping[str, int]]
    per_project: Mapping[str, Mapping[str, int]]
    files_scanned: int
    exit_code: int

    def to_text(self) -> str:
        lines = [
            f"corpus: {self.files_scanned} files, {self.total_expected} expectations",
            f"matched={self.matched} missing={len(self.missing)} unexpected={len(self.unexpected)}",
            "",
            f"{'rule':<8} {'expected':>8} {'detected':>8} {'projects':>8} {'missing':>8} {'unexpected':>10}",
        ]
        for code in sorted(self.per_rule):
            row = self.per_rule[code]
            lines.append(
                f"{code:<8} {row['expected']:>8} {row['detected']:>8} {row['projects']:>8} "
                f"{row['missing']:>8} {row['unexpected']:>10}"
            )
        if self.per_project:
            lines.append("")
            lines.append(f"{'project':<24} " + " ".join(f"{code:>8}" for code in sorted(self.per_rule)))
            for project in sorted(self.per_project):
                counts = self.per_project[project]
                lines.append(
                    f"{project:<24} " + " ".join(f"{counts.get(code, 0):>8}" for code in sorted(self.per_rule))
                )
        for exp in self.missing:
            lines.append(f"missing: {exp.path}:{exp.line}: {exp.code}")
        for exp in self.unexpected:
            lines.append(f"unexpected: {exp.path}:{exp.line}: {exp.code}")
        return "\n".join(lines) + "\n"


def _project_of(path: str, corpus_root: str | Path) -> str:
    try:
        rel = Path(path).resolve().relative_to(Path(corpus_root).resolve())
    except ValueError:
        return "."
    return rel.parts[0] if len(rel.parts) > 1 else "."


def run_corpus(corpus_root: str | Path, config: Config | None = None) -> CorpusReport:
    """Check the corpus and diff findings against its inline expectations."""
    config = config or Config()
    state = _run_pipeline([corpus_root], config)

    notices: list[Notice] = []
    expectations: list[Expectation] = []
    for unit in state.units:
        expectations.extend(parse_expectations(unit, notices))

    expected = Counter((e.path, e.line, e.code) for e in expectations)
    emitted = [d for d in state.diags if not d.suppressed]
    actual = Counter((d.path, d.span.start_line, d.code) for d in emitted)

    matched = sum((expected & actual).values())
    missing = sorted(
        Expectation(path, line, code)
        for (path, line, code), count in (expected - actual).items()
        for _ in range(count)
    )
    unexpected = sorted(
        Expectation(path, line, code)
        for (path, line, code), count in (actual - expected).items()
        for _ in range(count)
    )

    per_rule: dict[str, dict[str, int]] = {}
    for code in config.rules:
        detected = [d for d in emitted if d.code == code]
        per_rule[code] = {
            "expected": sum(1 for e in expectations if e.code == code),
            "detected": len(detected),
            "projects": len({_project_of(d.path, corpus_root) for d in detected}),
            "missing": sum(1 for e in missing if e.code == code),
            "unexpected": sum(1 for e in unexpected if e.code == code),
        }
    per_project: dict[str, dict[str, int]] = {}
    for diag in emitted:
        project = _project_of(diag.path, corpus_root)
        per_project.setdefault(project, {}).setdefault(diag.code, 0)
        per_project[project][diag.code] += 1

    ok = not missing and not unexpected
    return CorpusReport(
        total_expected=len(expectations),
        matched=matched,
        missing=tuple(missing),
        unexpected=tuple(unexpected),
        per_rule=per_rule,
        per_project=per_project,
        files_scanned=state.summary.files_scanned,
        exit_code=EXIT_CLEAN if ok else EXIT_FINDINGS,
    )
