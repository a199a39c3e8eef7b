"""CSV and JSON writers for command output.

CSV files open with ``#`` comment lines naming the tool version and the
resolved run configuration; JSON documents carry the same information in
their ``tool``, ``version`` and ``config`` fields.  Floats are written with
their shortest round-trip representation so reruns give identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np

from . import __version__


def header_lines(command: str, config: dict) -> list[str]:
    return [
        f"entrorisk {__version__} {command}",
        "config: " + json.dumps(jsonable(config), sort_keys=True),
    ]


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


@contextmanager
def _open(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_csv(path, header: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a commented CSV to ``path`` (``None`` or ``-`` for stdout)."""
    with _open(path) as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def jsonable(obj):
    """Recursively convert numpy scalars/arrays to JSON types; NaN becomes ``None``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return None if math.isnan(f) or math.isinf(f) else f
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.datetime64):
        return str(obj)
    return obj


def write_json(path, command: str, config: dict, body: dict) -> None:
    doc = {"tool": "entrorisk", "version": __version__, "command": command, "config": config, **body}
    with _open(path) as fh:
        json.dump(jsonable(doc), fh, indent=2, sort_keys=False)
        fh.write("\n")
