"""Instrument-and-execute agreement suite for the repeated-creation rule.

Each snippet runs twice: once under a stub ``tensorflow`` module that
records every ``tf.matmul`` argument tuple per iteration, and once through
the static rule.  The rule must flag exactly when all recorded tuples are
identical.  Snippets are authored to stay clear of the documented
mutator-heuristic gap.
"""
from __future__ import annotations

import pytest

from conftest import findings_for, record_sentinel_calls

from dlperf import load_catalog

CATALOG = load_catalog()

# (name, snippet); the oracle decides the verdict, never the test author
SNIPPETS = [
    (
        "invariant_constants",
        "import tensorflow as tf\n"
        "a = 2\n"
        "b = 3\n"
        "for i in range(5):\n"
        "    tf.matmul(a, b)\n",
    ),
    (
        "control_var_argument",
        "import tensorflow as tf\n"
        "a = 2\n"
        "for i in range(5):\n"
        "    tf.matmul(a, i)\n",
    ),
    (
        "augmented_counter",
        "import tensorflow as tf\n"
        "a = 1\n"
        "s = 0\n"
        "for i in range(5):\n"
        "    s += 1\n"
        "    tf.matmul(a, s)\n",
    ),
    (
        "invariant_loop_local",
        "import tensorflow as tf\n"
        "a = 4\n"
        "b = 5\n"
        "for i in range(5):\n"
        "    y = a + b\n"
        "    tf.matmul(y, b)\n",
    ),
    (
        "while_counter",
        "import tensorflow as tf\n"
        "a = 7\n"
        "n = 0\n"
        "while n < 5:\n"
        "    n += 1\n"
        "    tf.matmul(a, n)\n",
    ),
    (
        "unused_tuple_targets",
        "import tensorflow as tf\n"
        "a = 1\n"
        "b = 2\n"
        "for p, q in [(1, 2), (3, 4), (5, 6)]:\n"
        "    tf.matmul(a, b)\n",
    ),
    (
        "argumentless_call",
        "import tensorflow as tf\n"
        "for i in range(4):\n"
        "    tf.matmul()\n",
    ),
    (
        "attribute_mutation",
        "import tensorflow as tf\n"
        "import types\n"
        "obj = types.SimpleNamespace(v=0)\n"
        "a = 3\n"
        "for i in range(5):\n"
        "    obj.v = i\n"
        "    tf.matmul(a, obj.v)\n",
    ),
    (
        "curated_mutator_append",
        "import tensorflow as tf\n"
        "a = 1\n"
        "xs = []\n"
        "for i in range(5):\n"
        "    xs.append(i)\n"
        "    tf.matmul(a, len(xs))\n",
    ),
    (
        "changed_keyword_argument",
        "import tensorflow as tf\n"
        "a = 6\n"
        "for i in range(5):\n"
        "    tf.matmul(a, b=i)\n",
    ),
    (
        "builder_invariant",
        "import tensorflow as tf\n"
        "def build(x):\n"
        "    return tf.matmul(x, 4)\n"
        "for i in range(5):\n"
        "    build(7)\n",
    ),
    (
        "builder_changed_param",
        "import tensorflow as tf\n"
        "def build(x):\n"
        "    return tf.matmul(x, 4)\n"
        "for i in range(5):\n"
        "    build(i)\n",
    ),
    (
        "swap_dance",
        "import tensorflow as tf\n"
        "a = 1\n"
        "b = 2\n"
        "for i in range(5):\n"
        "    t = a\n"
        "    a = b\n"
        "    b = t\n"
        "    tf.matmul(a, 1)\n",
    ),
    (
        "string_invariant",
        "import tensorflow as tf\n"
        "msg = 'fixed'\n"
        "for i in range(3):\n"
        "    tf.matmul(msg, 'suffix')\n",
    ),
]


def _statically_flagged(snippet: str) -> bool:
    findings = findings_for(snippet, CATALOG)
    return any(f.rule.code == "RNC001" and f.subject == "tensorflow.matmul" for f in findings)


@pytest.mark.parametrize("name,snippet", SNIPPETS, ids=[name for name, _ in SNIPPETS])
def test_rule_agrees_with_execution_oracle(name, snippet):
    records = record_sentinel_calls(snippet)
    assert len(records) >= 2, "oracle needs at least two iterations"
    all_identical = all(r == records[0] for r in records)
    assert _statically_flagged(snippet) == all_identical


def test_suite_covers_both_verdicts():
    verdicts = {name: _statically_flagged(snippet) for name, snippet in SNIPPETS}
    assert len(SNIPPETS) >= 10
    assert any(verdicts.values()) and not all(verdicts.values())
