"""Walkthrough: input-pipeline ordering and parallelism checks.

Run from the repository root:  python demos/demo_pipeline_rules.py
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlperf import (
    build_alias_table,
    check_map_before_batch,
    check_missing_parallelism,
    load_catalog,
    parse_source,
    track_datasets,
)

# Element-wise map before batch, and no num_parallel_calls: both smells.
SNIPPET = """\
import tensorflow as tf

ds = tf.data.TFRecordDataset(files)
ds = ds.shuffle(10000)
ds = ds.map(parse_record)
ds = ds.batch(64)
ds = ds.repeat()
"""

catalog = load_catalog()
unit = parse_source("input.py", SNIPPET).unit
states = track_datasets(unit, build_alias_table(unit), catalog)

# Pipeline provenance: which transformer calls were applied, in order.
for state in states:
    steps = " -> ".join(tail for tail, _ in state.history)
    print(f"pipeline '{state.name}': {steps}")

for finding in check_map_before_batch(states):
    print(f"line {finding.span.start_line}: MOB001 map precedes batch")
for finding in check_missing_parallelism(states, catalog):
    print(f"line {finding.span.start_line}: DPM001 {finding.subject} runs serially")

# Reordering batch before map and passing num_parallel_calls clears both;
# the mapped function must then accept whole batches.
FIXED = """\
import tensorflow as tf

ds = tf.data.TFRecordDataset(files)
ds = ds.shuffle(10000)
ds = ds.batch(64)
ds = ds.map(parse_batch, num_parallel_calls=tf.data.AUTOTUNE)
ds = ds.repeat()
"""
fixed_unit = parse_source("input_fixed.py", FIXED).unit
fixed_states = track_datasets(fixed_unit, build_alias_table(fixed_unit), catalog)
remaining = check_map_before_batch(fixed_states) + check_missing_parallelism(fixed_states, catalog)
print(f"findings after the fix: {len(remaining)}")
