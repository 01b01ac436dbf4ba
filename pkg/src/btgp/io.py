"""CSV inspection input, deterministic JSON/CSV output and result-schema validation."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from importlib import resources

import jsonschema
import numpy as np

from .errors import DataError, InputError
from .inference import AssetHistory

REQUIRED_COLUMNS = ("asset_id", "age_years", "condition")


def load_inspections(path, x_lim: float = 100.0, notices: list | None = None) -> list:
    """Read ``asset_id,age_years,condition`` rows into per-asset histories.

    Histories come back in order of first appearance with records sorted by
    age.  Every malformed row is reported (with its line number) in a single
    :class:`DataError`; out-of-order rows are sorted and noted in ``notices``.
    """
    notices = [] if notices is None else notices
    rows: dict[str, list[tuple[float, float, int]]] = {}
    errors = []
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc.strerror}", path=str(path)) from exc
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise InputError(f"{path}: missing column(s) {', '.join(missing)}",
                             path=str(path), missing=missing)
        for rec in reader:
            line = reader.line_num
            aid = (rec["asset_id"] or "").strip()
            try:
                age = float(rec["age_years"])
                cond = float(rec["condition"])
            except (TypeError, ValueError):
                errors.append({"line": line, "message": "unparseable number"})
                continue
            if not aid:
                errors.append({"line": line, "message": "empty asset_id"})
            elif not (math.isfinite(age) and age >= 0):
                errors.append({"line": line, "message": f"age {age} must be finite and >= 0"})
            elif not (0.0 <= cond <= x_lim):
                errors.append({"line": line,
                               "message": f"condition {cond} outside [0, {x_lim}]"})
            else:
                rows.setdefault(aid, []).append((age, cond, line))
    histories = []
    for aid, recs in rows.items():
        ages = [r[0] for r in recs]
        if ages != sorted(ages):
            notices.append(f"asset {aid}: rows were not in age order and have been sorted")
        recs = sorted(recs, key=lambda r: r[0])
        for a, b in zip(recs, recs[1:]):
            if a[0] == b[0]:
                errors.append({"line": b[2],
                               "message": f"duplicate age {b[0]} for asset {aid} "
                                          f"(first seen on line {a[2]})"})
        histories.append((aid, recs))
    if errors:
        errors.sort(key=lambda e: e["line"])
        first = errors[0]
        raise DataError(f"{path}: {len(errors)} bad row(s); line {first['line']}: "
                        f"{first['message']}", path=str(path), errors=errors)
    if not histories:
        raise InputError(f"{path}: no inspection rows", path=str(path))
    return [AssetHistory(aid, [(a, c) for a, c, _ in recs], x_lim) for aid, recs in histories]


# -- output -----------------------------------------------------------------


def plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(doc) -> str:
    return json.dumps(plain(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _atomic_write(path, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, doc):
    _atomic_write(path, dumps(doc))


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        if len(r) != len(header):
            raise ValueError("row length does not match header")
        lines.append(",".join(_cell(v) for v in r))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows):
    _atomic_write(path, csv_text(header, rows))


# -- schema -----------------------------------------------------------------


def result_schema() -> dict:
    text = resources.files("btgp").joinpath("schemas/result.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_document(doc) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` breaks the result schema."""
    jsonschema.validate(doc, result_schema())
