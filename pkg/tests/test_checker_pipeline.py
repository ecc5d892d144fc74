from __future__ import annotations

from conftest import FIXTURES, findings_for, make_unit, unit_from_file

from dlperf import (
    build_alias_table,
    check_map_before_batch,
    check_missing_parallelism,
    track_datasets,
)


def _states(text: str, catalog):
    unit = make_unit(text)
    return track_datasets(unit, build_alias_table(unit), catalog)


def _pipeline(*steps: str) -> str:
    lines = ["import tensorflow as tf", "ds = tf.data.TFRecordDataset(files)"]
    lines.extend(f"ds = ds.{step}" for step in steps)
    return "\n".join(lines) + "\n"


def test_fig1_buggy_one_mob_finding(catalog):
    unit = unit_from_file(FIXTURES / "fig1_buggy.py")
    states = track_datasets(unit, build_alias_table(unit), catalog)
    findings = check_map_before_batch(states)
    assert len(findings) == 1
    map_line = findings[0].span.start_line
    assert "ds.map(_parser)" in unit.text.splitlines()[map_line - 1]


def test_fig1_fixed_no_mob_finding(catalog):
    unit = unit_from_file(FIXTURES / "fig1_fixed.py")
    states = track_datasets(unit, build_alias_table(unit), catalog)
    assert check_map_before_batch(states) == []


def test_map_without_batch_not_flagged(catalog):
    states = _states(_pipeline("map(f)", "repeat()"), catalog)
    assert check_map_before_batch(states) == []


def test_batch_before_map_not_flagged(catalog):
    states = _states(_pipeline("batch(32)", "map(f, num_parallel_calls=4)"), catalog)
    assert check_map_before_batch(states) == []


def test_two_maps_before_one_batch_two_findings(catalog):
    states = _states(_pipeline("map(f)", "map(g)", "batch(32)"), catalog)
    assert len(check_map_before_batch(states)) == 2


def test_map_after_first_batch_not_flagged_again(catalog):
    states = _states(_pipeline("map(f)", "batch(32)", "map(g)", "batch(4)"), catalog)
    findings = check_map_before_batch(states)
    assert len(findings) == 1  # only the map that precedes the first batch


def test_padded_batch_terminates_pair(catalog):
    states = _states(_pipeline("map(f)", "padded_batch(32, shapes)"), catalog)
    assert len(check_map_before_batch(states)) == 1


def test_shuffle_between_map_and_batch_still_flagged(catalog):
    states = _states(_pipeline("map(f)", "shuffle(100)", "batch(32)"), catalog)
    assert len(check_map_before_batch(states)) == 1


def test_mob_pairs_with_nearest_following_batch(catalog):
    states = _states(_pipeline("map(f)", "batch(32)", "batch(4)"), catalog)
    findings = check_map_before_batch(states)
    assert len(findings) == 1
    nearest = findings[0].detail["batch_span"]
    # line 1 import, line 2 constructor, line 3 map, line 4 first batch
    assert nearest.start_line == 4


def test_dpm_fig1_buggy(catalog):
    unit = unit_from_file(FIXTURES / "fig1_buggy.py")
    states = track_datasets(unit, build_alias_table(unit), catalog)
    findings = check_missing_parallelism(states, catalog)
    assert len(findings) == 1
    assert findings[0].subject == "map"


def test_dpm_fig1_fixed_clean(catalog):
    unit = unit_from_file(FIXTURES / "fig1_fixed.py")
    states = track_datasets(unit, build_alias_table(unit), catalog)
    assert check_missing_parallelism(states, catalog) == []


def test_dpm_interleave_flagged(catalog):
    states = _states(_pipeline("interleave(g)"), catalog)
    findings = check_missing_parallelism(states, catalog)
    assert len(findings) == 1
    assert findings[0].subject == "interleave"


def test_dpm_any_value_counts_as_set(catalog):
    for value in ("1", "4", "workers", "tf.data.AUTOTUNE"):
        states = _states(_pipeline(f"map(f, num_parallel_calls={value})"), catalog)
        assert check_missing_parallelism(states, catalog) == [], value


def test_dpm_kwargs_splat_stays_silent(catalog):
    states = _states(_pipeline("map(f, **options)"), catalog)
    assert check_missing_parallelism(states, catalog) == []


def test_dpm_non_parallelizable_transformers_ignored(catalog):
    states = _states(_pipeline("shuffle(10)", "batch(2)", "prefetch(1)"), catalog)
    assert check_missing_parallelism(states, catalog) == []


def test_builtin_map_never_flagged(catalog):
    findings = findings_for("xs = map(f, items)\nys = list(xs)\n", catalog)
    assert findings == []


def test_inline_chain_flags_both_rules(catalog):
    text = (
        "import tensorflow as tf\n"
        "it = tf.data.TFRecordDataset(files).map(f).batch(32)\n"
    )
    findings = findings_for(text, catalog)
    assert sorted(f.rule.code for f in findings) == ["DPM001", "MOB001"]


def test_order_sensitivity_swapping_map_and_batch_clears_mob(catalog):
    buggy = _pipeline("shuffle(10)", "map(f, num_parallel_calls=2)", "batch(32)")
    fixed = _pipeline("shuffle(10)", "batch(32)", "map(f, num_parallel_calls=2)")
    assert len(check_map_before_batch(_states(buggy, catalog))) == 1
    assert check_map_before_batch(_states(fixed, catalog)) == []


def test_run_rules_fig1_buggy_exactly_two_findings(catalog):
    text = (FIXTURES / "fig1_buggy.py").read_text(encoding="utf-8")
    findings = findings_for(text, catalog)
    assert [f.rule.code for f in findings] == ["DPM001", "MOB001"]
    spans = {f.span for f in findings}
    assert len(spans) == 1  # both point at the same map call


def test_run_rules_disabled_rules_produce_nothing(catalog):
    text = (FIXTURES / "fig1_buggy.py").read_text(encoding="utf-8")
    assert findings_for(text, catalog, enabled=()) == []


def test_combined_fixture_corpus_totals(catalog):
    # derived: the sum of the per-fixture golden counts
    files = {
        "fig1.py": (FIXTURES / "fig1_buggy.py").read_text(encoding="utf-8"),
        "fig2.py": (FIXTURES / "fig2_buggy.py").read_text(encoding="utf-8"),
    }
    findings = findings_for(files, catalog)
    assert len(findings) == 4
