"""Dataset types and the plain-text file formats used by the CLI.

Formats (comma-separated, ``.`` decimal point, ``\\n`` line endings):

* features:      ``id,f0,...,f{d-1}``
* labels/truth:  ``id,label``
* pseudo-labels: ``id,label,confidence,source``
* report:        one JSON object, see :data:`REPORT_KEYS`
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateCatalog,
    DuplicateId,
    MalformedFeature,
    MalformedRow,
    MissingMetric,
    UnknownId,
    WriteError,
)

SOURCES = ("given", "propagated", "unpropagated")
REPORT_KEYS = (
    "method",
    "labeled_fraction",
    "accuracy",
    "macro_f1",
    "iterations",
    "converged",
    "config",
)


@dataclass(frozen=True, eq=False)
class FeatureSet:
    ids: tuple[str, ...]
    features: np.ndarray

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        feats = np.array(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if len(ids) != feats.shape[0]:
            raise ValueError(f"{len(ids)} ids for {feats.shape[0]} feature rows")
        if feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError("need n >= 1 and d >= 1")
        if any(not i for i in ids):
            raise ValueError("empty object id")
        if len(set(ids)) != len(ids):
            raise DuplicateId(_first_duplicate(ids))
        if not np.all(np.isfinite(feats)):
            raise ValueError("features contain NaN or Inf")
        feats.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(ids)})

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def index_of(self, obj_id: str) -> int:
        try:
            return self._index[obj_id]
        except KeyError:
            raise UnknownId(f"unknown object id {obj_id!r}") from None

    def subset(self, ids: Iterable[str]) -> "FeatureSet":
        """Rows for `ids`, in the order given."""
        ids = list(ids)
        rows = [self.index_of(i) for i in ids]
        return FeatureSet(tuple(ids), self.features[rows])


@dataclass(frozen=True)
class ClassCatalog:
    """Sorted class names; a class's index is its sorted position."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(sorted(set(self.names)))
        if len(names) != len(self.names):
            raise DuplicateId("duplicate class name in catalog")
        if len(names) < 2:
            raise DegenerateCatalog(f"need at least 2 classes, got {list(names)}")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "ClassCatalog":
        return cls(tuple(sorted(set(names))))

    @property
    def m(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        # names are sorted, so bisect would do; m is small
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownId(f"unknown class {name!r}") from None


@dataclass(frozen=True)
class PartialLabeling:
    labeled: Mapping[str, int]
    unlabeled: frozenset
    catalog: ClassCatalog

    def __post_init__(self):
        object.__setattr__(self, "unlabeled", frozenset(self.unlabeled))
        if not self.labeled:
            raise ValueError("a partial labeling needs at least one labeled object")
        overlap = self.unlabeled.intersection(self.labeled)
        if overlap:
            raise ValueError(f"objects both labeled and unlabeled: {sorted(overlap)[:5]}")
        for obj, h in self.labeled.items():
            if not 0 <= h < self.catalog.m:
                raise ValueError(f"class index {h} of {obj!r} out of range")

    @property
    def m(self) -> int:
        return self.catalog.m

    def seed_vector(self, ids: Sequence[str]) -> np.ndarray:
        """Class index per object in `ids` order, -1 for unlabeled objects."""
        if len(ids) != len(self.labeled) + len(self.unlabeled):
            raise ValueError("labeling does not cover the given ids")
        seeds = np.full(len(ids), -1, dtype=np.int64)
        for pos, obj in enumerate(ids):
            h = self.labeled.get(obj)
            if h is not None:
                seeds[pos] = h
            elif obj not in self.unlabeled:
                raise UnknownId(f"object {obj!r} missing from labeling")
        return seeds


@dataclass
class PseudoLabelResult:
    ids: tuple[str, ...]
    labels: np.ndarray
    confidence: np.ndarray
    source: tuple[str, ...]
    iterations: int = 0
    converged: bool = True
    residual: float = 0.0
    strategies: np.ndarray | None = field(default=None, repr=False)


def _first_duplicate(items):
    seen = set()
    for it in items:
        if it in seen:
            return f"duplicate id {it!r}"
        seen.add(it)
    return "duplicate id"


def _open_write(path):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def read_features(path) -> FeatureSet:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2 or header[0] != "id":
            raise MalformedRow(0, "expected header id,f0,...")
        d = len(header) - 1
        ids, rows, seen = [], [], set()
        for rowno, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != d + 1:
                raise MalformedRow(rowno, f"expected {d + 1} fields, got {len(row)}")
            obj = row[0]
            if obj in seen:
                raise DuplicateId(f"duplicate id {obj!r} at row {rowno}")
            seen.add(obj)
            try:
                vals = [float(v) for v in row[1:]]
            except ValueError:
                raise MalformedFeature(rowno) from None
            if not all(math.isfinite(v) for v in vals):
                raise MalformedFeature(rowno)
            ids.append(obj)
            rows.append(vals)
    if not rows:
        raise MalformedRow(1, "no data rows")
    return FeatureSet(tuple(ids), np.array(rows, dtype=np.float64))


def write_features(features: FeatureSet, path) -> None:
    with _open_write(path) as fh:
        fh.write("id," + ",".join(f"f{j}" for j in range(features.d)) + "\n")
        for obj, row in zip(features.ids, features.features):
            # repr round-trips a float64 exactly
            fh.write(obj + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_label_map(path, sources: Iterable[str] | None = None) -> dict[str, str]:
    """Raw ``id -> label`` mapping from a labels or pseudo-labels file.

    With `sources`, rows of a pseudo-labels file whose ``source`` column is
    not listed are skipped.
    """
    keep = set(sources) if sources is not None else None
    out: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["id", "label"]:
            raise MalformedRow(0, "expected header id,label")
        src_col = header.index("source") if "source" in header else None
        for rowno, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(rowno, f"expected {len(header)} fields, got {len(row)}")
            if keep is not None and src_col is not None and row[src_col] not in keep:
                continue
            if row[0] in out:
                raise DuplicateId(f"id {row[0]!r} labeled twice (row {rowno})")
            out[row[0]] = row[1]
    return out


def read_source_map(path) -> dict[str, str]:
    """``id -> source`` from a pseudo-labels file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "source" not in reader.fieldnames:
            raise MalformedRow(0, "no source column")
        return {row["id"]: row["source"] for row in reader}


def read_labels(
    path,
    features: FeatureSet,
    classes: Sequence[str] | None = None,
    sources: Iterable[str] | None = None,
) -> PartialLabeling:
    raw = read_label_map(path, sources=sources)
    for obj in raw:
        if obj not in features._index:
            raise UnknownId(f"labeled id {obj!r} not in features")
    catalog = ClassCatalog.from_names(set(raw.values()) | set(classes or ()))
    labeled = {obj: catalog.index(name) for obj, name in raw.items()}
    unlabeled = frozenset(i for i in features.ids if i not in labeled)
    return PartialLabeling(labeled, unlabeled, catalog)


def write_labels(ids: Sequence[str], names: Sequence[str], path) -> None:
    with _open_write(path) as fh:
        fh.write("id,label\n")
        for obj, name in zip(ids, names):
            fh.write(f"{obj},{name}\n")


def write_pseudo_labels(result: PseudoLabelResult, catalog: ClassCatalog, path) -> None:
    with _open_write(path) as fh:
        fh.write("id,label,confidence,source\n")
        for obj, h, conf, src in zip(
            result.ids, result.labels, result.confidence, result.source
        ):
            fh.write(f"{obj},{catalog.names[int(h)]},{float(conf):.6f},{src}\n")


def write_report(metrics: Mapping, path) -> None:
    missing = [k for k in REPORT_KEYS if k not in metrics]
    if missing:
        raise MissingMetric(f"report is missing keys: {', '.join(missing)}")
    text = json.dumps(
        _plain(metrics), sort_keys=True, separators=(",", ":"), allow_nan=False
    )
    with _open_write(path) as fh:
        fh.write(text + "\n")


def read_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
