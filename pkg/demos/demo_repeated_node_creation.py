"""Walkthrough: detecting repeated graph-node creation in loops.

Run from the repository root:  python demos/demo_repeated_node_creation.py
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlperf import (
    build_alias_table,
    build_function_table,
    changed_vars,
    check_repeated_node_creation,
    load_catalog,
    parse_source,
)
from dlperf.checkers import loop_contexts

# A classic training-loop mistake: the multiply and the loss end up inside
# the loop, so the graph grows by identical nodes on every iteration.
SNIPPET = """\
import tensorflow as tf

inputs = tf.constant([[1.0, 2.0]])
weights = tf.Variable([[0.5], [0.5]])
optimizer = tf.train.GradientDescentOptimizer(0.1)

sess = tf.Session()
for epoch in range(1000):
    prediction = tf.matmul(inputs, weights)
    sess.run(optimizer.minimize(prediction))
"""

unit = parse_source("training.py", SNIPPET).unit
aliases = build_alias_table(unit)
catalog = load_catalog()

# First look at what the loop actually changes between iterations.  Only
# `epoch` varies; `prediction` is rebuilt from loop-invariant names.
for site, enclosing in loop_contexts(unit):
    analysis = changed_vars(site, enclosing)
    print(f"loop at line {site.span.start_line}: changed = {sorted(analysis.changed)}")

# The rule flags every node-creating call whose arguments dodge all
# changed variables, following project-local callees two levels deep.
functab = build_function_table([unit])
for finding in check_repeated_node_creation(unit, aliases, functab, catalog):
    print(f"line {finding.span.start_line}: {finding.rule.code} on {finding.subject}")

# Hoisting the graph construction out of the loop clears every finding.
FIXED = """\
import tensorflow as tf

inputs = tf.constant([[1.0, 2.0]])
weights = tf.Variable([[0.5], [0.5]])
optimizer = tf.train.GradientDescentOptimizer(0.1)
prediction = tf.matmul(inputs, weights)
train_op = optimizer.minimize(prediction)

sess = tf.Session()
for epoch in range(1000):
    sess.run(train_op)
"""
fixed_unit = parse_source("training_fixed.py", FIXED).unit
fixed = check_repeated_node_creation(
    fixed_unit, build_alias_table(fixed_unit), build_function_table([fixed_unit]), catalog
)
print(f"findings after the fix: {len(fixed)}")
