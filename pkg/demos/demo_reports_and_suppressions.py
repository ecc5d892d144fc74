"""Walkthrough: the full pipeline, JSON reports, and suppression markers.

Run from the repository root:  python demos/demo_reports_and_suppressions.py
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlperf import Config, render_json, render_text, run_check, run_corpus

ROOT = Path(__file__).resolve().parents[1]

# run_check drives discovery, parsing, resolution, rules, and suppression.
diags, summary = run_check([ROOT / "fixtures" / "fig1_buggy.py"])
print(render_text(diags, summary))

# The JSON form is byte-stable and schema-versioned; see
# docs/diagnostics-schema.md for the field reference.
print(render_json(diags, summary))

# An inline marker silences one rule on one line without touching others.
marked = ROOT / "fixtures" / "fig1_buggy.py"
snippet = marked.read_text(encoding="utf-8").replace(
    "ds = ds.map(_parser)", "ds = ds.map(_parser)  # dlperf: ignore[DPM001]"
)
work = Path("/tmp/dlperf_demo")
work.mkdir(exist_ok=True)
(work / "suppressed.py").write_text(snippet, encoding="utf-8")
diags, summary = run_check([work], Config(show_suppressed=True))
print(render_text(diags, summary, show_suppressed=True))

# Corpus mode diffs findings against `# expect: CODE` annotations and
# reports per-rule and per-project detection counts.
report = run_corpus(ROOT / "corpus")
print(report.to_text())
