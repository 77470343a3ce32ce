"""Reader for the experiment CSVs written by `risuav run` and `risuav sweep`."""

import csv
import io
from collections import OrderedDict
from pathlib import Path

RESULT_COLUMNS = ("mode", "seed", "timeblock", "sum_rate", "min_rate", "iterations", "feasible", "wall_ms")
SWEEP_COLUMNS = ("axis", "value") + RESULT_COLUMNS

_TYPES = {
    "axis": str,
    "value": float,
    "mode": str,
    "seed": int,
    "timeblock": int,
    "sum_rate": float,
    "min_rate": float,
    "iterations": int,
    "feasible": lambda v: v == "1",
    "wall_ms": float,
}


class SchemaError(ValueError):
    """The CSV does not carry the expected columns or rows."""


def read_results(source):
    """Parse a results or sweep CSV (path or text) into a list of typed dicts."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for column in RESULT_COLUMNS:
        if column not in header:
            raise SchemaError(f"missing column: {column}")
    if "axis" in header and "value" not in header:
        raise SchemaError("missing column: value")
    rows = []
    for raw in reader:
        rows.append({key: _TYPES.get(key, str)(value) for key, value in raw.items()})
    if not rows:
        raise SchemaError("no data rows")
    return rows


def group_means(rows, *keys, column="sum_rate"):
    """Mean of `column` per distinct value of `keys`, in first-seen order."""
    groups = OrderedDict()
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row[column])
    return OrderedDict((k, sum(v) / len(v)) for k, v in groups.items())
