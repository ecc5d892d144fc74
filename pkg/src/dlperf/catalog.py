"""API knowledge the rules consume.

The default catalog is a curated set of deterministic graph-building APIs,
dataset constructors, dataset transformer method tails, and the
parallelizable transformers with their parallelism keyword.  A user file
can replace or adjust each set (see ``docs/catalog.md`` for the format and
for the recipe to regenerate a fuller catalog from a TensorFlow source
tree).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .resolution import QualifiedName

_SET_KEYS = ("node_creating", "excluded_nondeterministic", "dataset_constructors", "dataset_transformers")
_KNOWN_KEYS = _SET_KEYS + ("version", "parallelizable", "namespace_aliases")

# Transformer tails every catalog must know about for the pipeline rules.
_REQUIRED_TRANSFORMERS = frozenset(
    {"batch", "map", "shuffle", "repeat", "prefetch", "filter", "interleave", "cache"}
)


class CatalogError(Exception):
    """Malformed or inconsistent catalog data; treated as a tool error."""


@dataclass(frozen=True)
class ApiCatalog:
    """Immutable, canonicalized API sets."""

    version: str
    node_creating: frozenset[str]
    excluded_nondeterministic: frozenset[str]
    dataset_constructors: frozenset[str]
    dataset_transformers: frozenset[str]
    parallelizable: Mapping[str, str]  # method tail -> keyword enabling parallelism
    namespace_aliases: tuple[tuple[str, str], ...]

    def canonicalize(self, name: QualifiedName | str) -> str:
        """Apply namespace aliases (longest prefix wins), e.g. ``keras.*``
        becomes ``tensorflow.keras.*``."""
        dotted = name.dotted if isinstance(name, QualifiedName) else name
        best: tuple[str, str] | None = None
        for prefix, canonical in self.namespace_aliases:
            if dotted == prefix or dotted.startswith(prefix + "."):
                if best is None or len(prefix) > len(best[0]):
                    best = (prefix, canonical)
        if best is None:
            return dotted
        prefix, canonical = best
        return canonical + dotted[len(prefix):]

    def is_node_creating(self, name: QualifiedName | str) -> bool:
        canonical = self.canonicalize(name)
        if canonical in self.excluded_nondeterministic:
            return False
        return canonical in self.node_creating

    def is_dataset_constructor(self, name: QualifiedName | str) -> bool:
        return self.canonicalize(name) in self.dataset_constructors

    def parallelism_keyword(self, method_tail: str) -> str | None:
        return self.parallelizable.get(method_tail)

    def to_json(self) -> str:
        """Canonical file form: sorted keys, sorted entries.  Loading the
        result reproduces this catalog exactly."""
        payload = {
            "version": self.version,
            "node_creating": sorted(self.node_creating),
            "excluded_nondeterministic": sorted(self.excluded_nondeterministic),
            "dataset_constructors": sorted(self.dataset_constructors),
            "dataset_transformers": sorted(self.dataset_transformers),
            "parallelizable": [
                {"keyword": keyword, "method": method}
                for method, keyword in sorted(self.parallelizable.items())
            ],
            "namespace_aliases": [list(pair) for pair in self.namespace_aliases],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def is_node_creating(catalog: ApiCatalog, name: QualifiedName | str) -> bool:
    return catalog.is_node_creating(name)


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CatalogError(message)


def _check_dotted(field: str, value: Any) -> str:
    _expect(isinstance(value, str) and value, f"{field}: entries must be non-empty strings, got {value!r}")
    _expect(all(seg for seg in value.split(".")), f"{field}: empty segment in {value!r}")
    return value


def _merge_set(field: str, base: set[str], value: Any, dotted: bool) -> set[str]:
    check = (lambda v: _check_dotted(field, v)) if dotted else (lambda v: _check_identifier(field, v))
    if isinstance(value, list):
        return {check(v) for v in value}
    if isinstance(value, dict):
        unknown = set(value) - {"add", "remove"}
        _expect(not unknown, f"{field}: unknown merge keys {sorted(unknown)}")
        out = set(base)
        for v in value.get("add", []):
            out.add(check(v))
        for v in value.get("remove", []):
            out.discard(check(v))
        return out
    raise CatalogError(f"{field}: expected an array or an add/remove object")


def _check_identifier(field: str, value: Any) -> str:
    _expect(isinstance(value, str) and value.isidentifier(), f"{field}: {value!r} is not a method name")
    return value


def _parse_parallelizable(value: Any) -> dict[str, str]:
    _expect(isinstance(value, list), "parallelizable: expected an array of objects")
    out: dict[str, str] = {}
    for item in value:
        _expect(isinstance(item, dict), f"parallelizable: expected objects, got {item!r}")
        unknown = set(item) - {"method", "keyword"}
        _expect(not unknown, f"parallelizable: unknown keys {sorted(unknown)}")
        method = _check_identifier("parallelizable.method", item.get("method"))
        keyword = _check_identifier("parallelizable.keyword", item.get("keyword"))
        out[method] = keyword
    return out


def _parse_aliases(value: Any) -> tuple[tuple[str, str], ...]:
    _expect(isinstance(value, list), "namespace_aliases: expected an array of pairs")
    out: list[tuple[str, str]] = []
    for item in value:
        _expect(
            isinstance(item, list) and len(item) == 2,
            f"namespace_aliases: expected [prefix, canonical] pairs, got {item!r}",
        )
        out.append((_check_dotted("namespace_aliases", item[0]), _check_dotted("namespace_aliases", item[1])))
    return tuple(out)


def _validate(catalog: ApiCatalog) -> ApiCatalog:
    overlap = catalog.node_creating & catalog.excluded_nondeterministic
    _expect(not overlap, f"node_creating overlaps excluded_nondeterministic: {sorted(overlap)}")
    missing = _REQUIRED_TRANSFORMERS - catalog.dataset_transformers
    _expect(not missing, f"dataset_transformers: required tails missing: {sorted(missing)}")
    for tail in ("map", "interleave"):
        _expect(tail in catalog.parallelizable, f"parallelizable: {tail!r} must be present")
    for field in ("node_creating", "excluded_nondeterministic", "dataset_constructors"):
        for entry in getattr(catalog, field):
            canonical = catalog.canonicalize(entry)
            _expect(
                canonical.split(".")[0] == "tensorflow",
                f"{field}: {entry!r} does not canonicalize under 'tensorflow'",
            )
    return catalog


def _read_json(path: Path) -> dict[str, Any]:
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog file {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CatalogError(f"{path}: top level must be a JSON object")
    return data


def _default_data() -> dict[str, Any]:
    text = resources.files("dlperf").joinpath("data/default_catalog.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_catalog(path: str | Path | None = None) -> ApiCatalog:
    """Load the embedded default catalog, then merge a user file over it.

    Unknown keys are rejected; set-valued keys accept either a plain array
    (replacing the default set) or ``{"add": [...], "remove": [...]}``.
    """
    data = _default_data()
    base = {
        "version": data["version"],
        "node_creating": set(data["node_creating"]),
        "excluded_nondeterministic": set(data["excluded_nondeterministic"]),
        "dataset_constructors": set(data["dataset_constructors"]),
        "dataset_transformers": set(data["dataset_transformers"]),
        "parallelizable": _parse_parallelizable(data["parallelizable"]),
        "namespace_aliases": _parse_aliases(data["namespace_aliases"]),
    }

    if path is not None:
        user = _read_json(Path(path))
        unknown = set(user) - set(_KNOWN_KEYS)
        _expect(not unknown, f"catalog: unknown keys {sorted(unknown)}")
        for key in _SET_KEYS:
            if key in user:
                dotted = key != "dataset_transformers"
                base[key] = _merge_set(key, base[key], user[key], dotted=dotted)
        if "parallelizable" in user:
            base["parallelizable"] = _parse_parallelizable(user["parallelizable"])
        if "namespace_aliases" in user:
            base["namespace_aliases"] = _parse_aliases(user["namespace_aliases"])
        if "version" in user:
            _expect(isinstance(user["version"], str), "version: expected a string")
            base["version"] = user["version"]

    catalog = ApiCatalog(
        version=base["version"],
        node_creating=frozenset(base["node_creating"]),
        excluded_nondeterministic=frozenset(base["excluded_nondeterministic"]),
        dataset_constructors=frozenset(base["dataset_constructors"]),
        dataset_transformers=frozenset(base["dataset_transformers"]),
        parallelizable=dict(sorted(base["parallelizable"].items())),
        namespace_aliases=tuple(base["namespace_aliases"]),
    )
    # entries are stored canonicalized so membership checks are one lookup
    catalog = ApiCatalog(
        version=catalog.version,
        node_creating=frozenset(catalog.canonicalize(e) for e in catalog.node_creating),
        excluded_nondeterministic=frozenset(catalog.canonicalize(e) for e in catalog.excluded_nondeterministic),
        dataset_constructors=frozenset(catalog.canonicalize(e) for e in catalog.dataset_constructors),
        dataset_transformers=catalog.dataset_transformers,
        parallelizable=catalog.parallelizable,
        namespace_aliases=catalog.namespace_aliases,
    )
    return _validate(catalog)
