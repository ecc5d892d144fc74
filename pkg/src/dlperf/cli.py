"""Command-line entry point.

``dlperf check PATH...`` runs the rules and prints text or JSON
diagnostics; ``dlperf corpus PATH`` diffs findings against the corpus
expectation annotations.  Exit codes: 0 clean, 1 findings (or corpus
mismatch), 2 tool error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Sequence

from .catalog import CatalogError
from .checkers import RULES_BY_CODE
from .harness import Config, ConfigError, load_config, run_check, run_corpus
from .reporting import EXIT_TOOL_ERROR, render_json, render_text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlperf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="analyze files or directories")
    check.add_argument("paths", nargs="+", metavar="PATH")
    check.add_argument("--format", choices=("text", "json"), default=None)
    check.add_argument("--rules", default=None, help="comma-separated rule codes to enable")
    check.add_argument("--catalog", default=None, help="catalog file merged over the default")
    check.add_argument("--config", default=None, help="JSON config file")
    check.add_argument("--depth", type=int, default=None, help="inter-procedural depth limit")
    check.add_argument("--show-suppressed", action="store_true", default=None)
    check.add_argument("--jobs", type=int, default=None, help="worker count for per-file analysis")
    check.add_argument("--include", action="append", default=None, metavar="GLOB")
    check.add_argument("--exclude", action="append", default=None, metavar="GLOB")

    corpus = sub.add_parser("corpus", help="run the expectation-annotated corpus")
    corpus.add_argument("path", metavar="PATH")
    corpus.add_argument("--config", default=None, help="JSON config file")
    return parser


def _config_from_args(args: argparse.Namespace) -> Config:
    config = load_config(args.config) if args.config else Config()
    overrides: dict[str, object] = {}
    if getattr(args, "format", None) is not None:
        overrides["format"] = args.format
    if getattr(args, "rules", None) is not None:
        codes = tuple(code.strip() for code in args.rules.split(",") if code.strip())
        for code in codes:
            if code not in RULES_BY_CODE:
                raise ConfigError(f"unknown rule code: {code}")
        overrides["rules"] = codes
    if getattr(args, "catalog", None) is not None:
        overrides["catalog_path"] = args.catalog
    if getattr(args, "depth", None) is not None:
        overrides["depth_limit"] = args.depth
    if getattr(args, "show_suppressed", None):
        overrides["show_suppressed"] = True
    if getattr(args, "jobs", None) is not None:
        overrides["jobs"] = args.jobs
    if getattr(args, "include", None):
        overrides["include"] = tuple(args.include)
    if getattr(args, "exclude", None):
        overrides["exclude"] = tuple(args.exclude)
    return replace(config, **overrides) if overrides else config


def _cmd_check(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    diags, summary = run_check(args.paths, config)
    if config.format == "json":
        sys.stdout.write(render_json(diags, summary, show_suppressed=config.show_suppressed))
    else:
        sys.stdout.write(render_text(diags, summary, show_suppressed=config.show_suppressed))
    for notice in summary.notices:
        sys.stderr.write(f"{notice.path}:{notice.line}: notice: {notice.message}\n")
    return summary.exit_code


def _cmd_corpus(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    report = run_corpus(args.path, config)
    sys.stdout.write(report.to_text())
    return report.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_corpus(args)
    except (ConfigError, CatalogError) as exc:
        sys.stderr.write(f"dlperf: error: {exc}\n")
        return EXIT_TOOL_ERROR


def console_main() -> None:
    raise SystemExit(main())
