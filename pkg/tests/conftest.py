from __future__ import annotations

import copy
import sys
import types
from pathlib import Path

import pytest

from dlperf import (
    ApiCatalog,
    build_alias_table,
    build_function_table,
    load_catalog,
    parse_source,
    run_rules,
)
from dlperf.source_model import SourceUnit

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"
CORPUS = REPO_ROOT / "corpus"


@pytest.fixture(scope="session")
def catalog() -> ApiCatalog:
    return load_catalog()


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


def make_unit(text: str, path: str = "snippet.py") -> SourceUnit:
    outcome = parse_source(path, text)
    assert outcome.unit is not None, f"fixture failed to parse: {outcome.error}"
    return outcome.unit


def unit_from_file(path: Path) -> SourceUnit:
    return make_unit(path.read_text(encoding="utf-8"), path=str(path))


def findings_for(texts: dict[str, str] | str, catalog: ApiCatalog, **kwargs):
    """Parse one snippet (or a path->text project) and run all rules."""
    if isinstance(texts, str):
        texts = {"snippet.py": texts}
    units = [make_unit(text, path) for path, text in texts.items()]
    aliases = {u.path: build_alias_table(u) for u in units}
    functab = build_function_table(units)
    return run_rules(units, aliases, functab, catalog, **kwargs)


def record_sentinel_calls(snippet: str) -> list[tuple]:
    """Instrument-and-execute oracle: run ``snippet`` with a stub
    ``tensorflow`` module and record every ``tf.matmul`` argument tuple."""
    records: list[tuple] = []

    def probe(*args, **kwargs):
        records.append(copy.deepcopy((args, tuple(sorted(kwargs.items())))))
        return 0

    stub = types.ModuleType("tensorflow")
    stub.matmul = probe
    saved = sys.modules.get("tensorflow")
    sys.modules["tensorflow"] = stub
    try:
        exec(compile(snippet, "<snippet>", "exec"), {"__name__": "__snippet__"})
    finally:
        if saved is None:
            sys.modules.pop("tensorflow", None)
        else:
            sys.modules["tensorflow"] = saved
    return records
