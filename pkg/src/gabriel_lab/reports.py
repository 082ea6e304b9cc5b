"""Serialization of reports and study tables.

Files are written atomically: the text goes to a temporary file in the target
directory, which then replaces the destination. CSV output is byte-stable:
floats use ``repr`` and the line terminator is always ``\\n``.
"""

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from gabriel_lab.inequalities import CSV_COLUMNS


def _cell(value):
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(rows, columns):
    """Render dict rows (or tuples already in column order) as CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(c) for c in columns]
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def reports_csv(reports):
    return to_csv((r.csv_row() for r in reports), CSV_COLUMNS)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def to_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
