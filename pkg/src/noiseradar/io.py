"""CSV and JSON file formats used by the command-line tools."""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .detection import RocCurve, RocModel
from .model import QtmsCovariance
from .synthesis import CHANNELS, SampleBlock

FLOAT_FMT = "%.17g"


class SchemaError(ValueError):
    """A data file does not match its documented format."""


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def manifest_path(path):
    p = Path(path)
    return p.with_name(p.name + ".manifest.json")


def dump_json(obj, path):
    """Write JSON deterministically (sorted keys, fixed indentation, trailing newline)."""
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    Path(path).write_text(text)
    return text


def write_csv(path, header, rows, comments=()):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for line in comments:
            fh.write(f"# {line}\n")
        np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",")


def read_csv(path, header):
    """Parse a numeric CSV with a fixed header; ``#`` lines are skipped."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot open ({exc.strerror})") from exc
    rows = []
    with fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            raise SchemaError(f"{path}: empty file")
        if [c.strip() for c in first] != list(header):
            raise SchemaError(f"{path}:1: expected header {','.join(header)!r}, got {','.join(first)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            values = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: field {name!r} is not a number: {cell!r}") from None
                if not math.isfinite(v):
                    raise SchemaError(f"{path}:{lineno}: field {name!r} is not finite")
                values.append(v)
            rows.append(values)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def write_block(block, path):
    """Write ``block`` as CSV plus a JSON metadata sidecar of the same basename."""
    write_csv(path, CHANNELS, block.channels)
    dump_json(block.metadata(), sidecar_path(path))
    return Path(path), sidecar_path(path)


def read_block(path):
    """Read a sample-block CSV; metadata comes from the sidecar when present."""
    X = read_csv(path, CHANNELS)
    seed, params, meta = None, None, {}
    side = sidecar_path(path)
    if side.exists():
        try:
            meta = json.loads(side.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{side}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        seed = meta.get("seed")
        if isinstance(seed, list):
            seed = tuple(seed)
        if meta.get("params") is not None:
            params = QtmsCovariance.from_dict(meta["params"])
        if meta.get("n") not in (None, X.shape[0]):
            raise SchemaError(f"{side}: n = {meta['n']} but CSV has {X.shape[0]} rows")
    return SampleBlock(X, seed=seed, params=params)


def write_roc_csv(curve, path):
    write_csv(path, ("p_fa", "p_d"), np.column_stack([curve.p_fa, curve.p_d]))


def read_roc_csv(path, model=RocModel.NOISE_RADAR, params=None):
    rows = read_csv(path, ("p_fa", "p_d"))
    return RocCurve(rows[:, 0], rows[:, 1], model, dict(params or {}))


def write_roc_json(curves, path):
    if isinstance(curves, RocCurve):
        payload = curves.to_dict()
    else:
        payload = {"curves": [c.to_dict() for c in curves]}
    dump_json(payload, path)


def read_roc_json(path):
    """Read one curve, or a ``{"curves": [...]}`` list, written by :func:`write_roc_json`."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    items = data["curves"] if "curves" in data else [data]
    curves = []
    for i, d in enumerate(items):
        missing = [k for k in ("model", "p_fa", "p_d") if k not in d]
        if missing:
            raise SchemaError(f"{path}: curve {i} is missing {', '.join(missing)}")
        try:
            curves.append(RocCurve(d["p_fa"], d["p_d"], RocModel(d["model"]), d.get("params", {})))
        except ValueError as exc:
            raise SchemaError(f"{path}: curve {i}: {exc}") from exc
    return curves if "curves" in data else curves[0]
