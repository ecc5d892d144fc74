from __future__ import annotations

import json

import pytest

from dlperf import CatalogError, load_catalog
from dlperf.catalog import is_node_creating


def test_default_contains_graph_builders(catalog):
    assert "tensorflow.matmul" in catalog.node_creating
    assert "tensorflow.train.GradientDescentOptimizer.minimize" in catalog.node_creating


def test_default_excludes_assign_and_random(catalog):
    assert "tensorflow.assign" not in catalog.node_creating
    assert "tensorflow.random.uniform" in catalog.excluded_nondeterministic


def test_membership_checks(catalog):
    assert is_node_creating(catalog, "tensorflow.matmul")
    assert not is_node_creating(catalog, "tensorflow.random.uniform")
    assert not is_node_creating(catalog, "builtins.print")


def test_excluded_membership_always_false_even_if_added(tmp_path):
    # a user adding an excluded API to node_creating still gets no flags for it
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": {"add": ["tensorflow.foo"]},
                                "excluded_nondeterministic": {"add": ["tensorflow.foo"]}}))
    with pytest.raises(CatalogError):
        load_catalog(path)  # disjointness is enforced instead


def test_required_transformers_present(catalog):
    for tail in ("batch", "map", "shuffle", "repeat", "prefetch", "filter", "interleave", "cache"):
        assert tail in catalog.dataset_transformers
    assert catalog.parallelism_keyword("map") == "num_parallel_calls"
    assert catalog.parallelism_keyword("interleave") == "num_parallel_calls"


def test_all_heads_are_tensorflow(catalog):
    for entry in catalog.node_creating | catalog.excluded_nondeterministic | catalog.dataset_constructors:
        assert entry.split(".")[0] == "tensorflow"


def test_namespace_canonicalization(catalog):
    assert catalog.canonicalize("keras.backend.dot") == "tensorflow.keras.backend.dot"
    assert catalog.canonicalize("tensorflow.compat.v1.matmul") == "tensorflow.matmul"
    assert catalog.canonicalize("tensorflow.matmul") == "tensorflow.matmul"
    assert catalog.canonicalize("kerastuner.thing") == "kerastuner.thing"


def test_merge_add(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": {"add": ["tensorflow.foo"]}}))
    merged = load_catalog(path)
    assert merged.is_node_creating("tensorflow.foo")
    assert merged.is_node_creating("tensorflow.matmul")  # defaults kept


def test_merge_remove(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": {"remove": ["tensorflow.matmul"]}}))
    merged = load_catalog(path)
    assert not merged.is_node_creating("tensorflow.matmul")


def test_plain_array_replaces_set(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": ["tensorflow.only_this"]}))
    merged = load_catalog(path)
    assert merged.node_creating == frozenset({"tensorflow.only_this"})


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_making": []}))
    with pytest.raises(CatalogError, match="node_making"):
        load_catalog(path)


def test_unknown_merge_key_rejected(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": {"append": ["tensorflow.x"]}}))
    with pytest.raises(CatalogError, match="node_creating"):
        load_catalog(path)


def test_malformed_json_error_names_line(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text('{\n  "version": "1",\n  broken\n}\n')
    with pytest.raises(CatalogError, match=r":3"):
        load_catalog(path)


def test_missing_file_is_a_load_error(tmp_path):
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "absent.json")


def test_non_tensorflow_head_rejected(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"node_creating": {"add": ["torch.matmul"]}}))
    with pytest.raises(CatalogError, match="torch.matmul"):
        load_catalog(path)


def test_removing_required_transformer_rejected(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"dataset_transformers": {"remove": ["map"]}}))
    with pytest.raises(CatalogError, match="map"):
        load_catalog(path)


def test_default_catalog_is_self_consistent(catalog):
    assert not (catalog.node_creating & catalog.excluded_nondeterministic)
    assert catalog.version == "1"


def test_membership_is_pure(catalog):
    assert [catalog.is_node_creating("tensorflow.matmul") for _ in range(3)] == [True] * 3


def test_load_save_round_trip(catalog, tmp_path):
    dumped = tmp_path / "dump.json"
    dumped.write_text(catalog.to_json(), encoding="utf-8")
    reloaded = load_catalog(dumped)
    assert reloaded == catalog
    assert reloaded.to_json() == catalog.to_json()
