"""Feature files, report documents and atomic writes.

A feature file is a CSV with header ``class,f0,...,f{d-1}`` and one sample per
row, next to a JSON manifest with the same stem::

    {"d": 2, "classes": ["cat", "dog"], "counts": [10, 12],
     "standardized": false, "source": "vit8 penultimate layer"}

Classes get integer ids in manifest order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import DataError, DomainError
from .features import FeatureSet
from .poset import AbstractModel


def manifest_path(path) -> Path:
    return Path(path).with_suffix(".json")


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a sibling temp file, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(doc, path) -> None:
    if str(path) == "-":
        sys.stdout.write(dumps(doc))
    else:
        atomic_write(path, dumps(doc))


def read_json(path):
    try:
        if str(path) == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def provenance(config: Optional[dict] = None, deterministic: bool = False, **extra) -> dict:
    prov = {"toolkit": "pairsep", "version": __version__}
    prov.update(extra)
    if config is not None:
        prov["config"] = config
    if not deterministic:
        prov["created"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return prov


def features_to_csv(features: FeatureSet) -> str:
    lines = [",".join(["class"] + [f"f{k}" for k in range(features.d)])]
    for name, X in zip(features.names, features.data):
        for row in X:
            lines.append(",".join([_csv_field(name)] + [format(v, ".17g") for v in row]))
    return "\n".join(lines) + "\n"


def _csv_field(text: str) -> str:
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_features(features: FeatureSet, path, standardized: bool = False, source: str = "") -> None:
    manifest = {"d": features.d, "classes": list(features.names), "counts": features.counts,
                "standardized": standardized, "source": source}
    atomic_write(path, features_to_csv(features))
    atomic_write(manifest_path(path), dumps(manifest))


def load_features(path) -> FeatureSet:
    """Parse a feature CSV and check it against its manifest."""
    path = Path(path)
    manifest = read_json(manifest_path(path))
    try:
        d = int(manifest["d"])
        names = [str(c) for c in manifest["classes"]]
        counts = manifest.get("counts")
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{manifest_path(path)}: malformed manifest ({exc})") from exc
    if d < 1 or not names:
        raise DataError(f"{manifest_path(path)}: manifest needs d >= 1 and at least one class")
    ids = {n: k for k, n in enumerate(names)}
    rows: list[list] = [[] for _ in names]
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["class"] + [f"f{k}" for k in range(d)]
        if header != expected:
            raise DataError(f"{path}:1: header must be {','.join(expected[:3])},... with d = {d}")
        for line, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != d + 1:
                raise DataError(f"{path}:{line}: expected {d + 1} fields, found {len(rec)}")
            if rec[0] not in ids:
                raise DataError(f"{path}:{line}: unknown class label {rec[0]!r}")
            try:
                vals = [float(v) for v in rec[1:]]
            except ValueError as exc:
                raise DataError(f"{path}:{line}: {exc}") from exc
            if not all(math.isfinite(v) for v in vals):
                raise DataError(f"{path}:{line}: non-finite value")
            rows[ids[rec[0]]].append(vals)
    for name, r in zip(names, rows):
        if not r:
            raise DataError(f"{path}: class {name!r} from the manifest has no samples")
    if counts is not None and [len(r) for r in rows] != list(counts):
        raise DataError(f"{path}: sample counts {[len(r) for r in rows]} disagree "
                        f"with manifest {list(counts)}")
    return FeatureSet(names, [np.array(r, dtype=np.float64) for r in rows])


def models_to_json(models, n: int, class_names=None) -> dict:
    return {
        "kind": "models",
        "n": n,
        "class_names": list(class_names) if class_names is not None else None,
        "models": [
            {"side_a": sorted(m.side_a), "side_b": sorted(m.side_b),
             "label": list(m.label) if m.label is not None else None}
            for m in models
        ],
    }


def models_from_json(doc: dict):
    """``(models, n, class_names)`` from a models document."""
    try:
        n = int(doc["n"])
        models = [
            AbstractModel(frozenset(int(c) for c in m["side_a"]),
                          frozenset(int(c) for c in m["side_b"]),
                          tuple(m["label"]) if m.get("label") is not None else None)
            for m in doc["models"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise DataError(f"invalid model: {exc}") from exc
        raise DataError(f"malformed models document: {exc}") from exc
    if not models:
        raise DataError("models document lists no models")
    return models, n, doc.get("class_names")
