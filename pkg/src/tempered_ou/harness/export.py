"""CSV, JSON and plot-script output."""
from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from ..ou_engine import paths_to_csv


def _open_out(path):
    if str(path) == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_text(text: str, path) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def matrix_to_csv(header: Sequence[str], rows: np.ndarray) -> str:
    """CSV with every number printed with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in np.atleast_2d(rows):
        w.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def paths_csv(times: np.ndarray, paths: np.ndarray) -> str:
    """Header ``t,path_0,...,path_{m-1}`` and one row per grid time."""
    return paths_to_csv(times, paths)


def read_csv(path_or_text) -> tuple[list, np.ndarray]:
    """Inverse of :func:`matrix_to_csv`: header and float matrix."""
    text = path_or_text
    if not isinstance(text, str) or "\n" not in text:
        text = Path(path_or_text).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def to_json(obj) -> str:
    """Pretty JSON with sorted keys so identical reports give identical text."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def export(obj, fmt: str, path) -> None:
    """Write a report (``to_dict``) or an ``(header, matrix)`` pair as CSV or JSON."""
    if fmt == "json":
        write_text(to_json(obj.to_dict() if hasattr(obj, "to_dict") else obj), path)
    elif fmt == "csv":
        header, rows = obj
        write_text(matrix_to_csv(header, rows), path)
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")


def plot_script(csv_path: str, columns: Sequence[str], title: str = "") -> str:
    """A standalone matplotlib script drawing one line per path column of ``csv_path``."""
    lines = [
        "import csv",
        "import matplotlib.pyplot as plt",
        "",
        f"with open({str(csv_path)!r}, newline='') as fh:",
        "    rows = list(csv.DictReader(fh))",
        "t = [float(r['t']) for r in rows]",
        "fig, ax = plt.subplots(figsize=(10, 4))",
    ]
    for c in columns:
        if c == "t":
            continue
        lines.append(f"ax.plot(t, [float(r[{c!r}]) for r in rows], lw=0.8, label={c!r})")
    lines += [
        "ax.set_xlabel('t')",
        f"ax.set_title({title!r})",
        "fig.tight_layout()",
        "plt.show()",
        "",
    ]
    return "\n".join(lines)


_NUM = {"type": "number"}


#: JSON Schema (draft 2020-12) of ``ValidationReport.to_dict()``.
VALIDATION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ValidationReport",
    "type": "object",
    "required": ["distribution", "params", "method", "statistic", "n", "seed", "build_id",
                 "elapsed_s", "records", "passed"],
    "properties": {
        "distribution": {"type": "string"},
        "params": {"type": "object"},
        "method": {"type": "string"},
        "statistic": {"enum": ["moment", "cumulant"]},
        "n": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "build_id": {"type": "string"},
        "elapsed_s": _NUM,
        "passed": {"type": "boolean"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["order", "true", "estimate", "err_pct", "se_pct", "tolerance_pct",
                             "passed", "absolute"],
                "properties": {
                    "order": {"type": "integer", "minimum": 1},
                    "true": _NUM, "estimate": _NUM, "err_pct": _NUM, "se_pct": _NUM,
                    "tolerance_pct": _NUM, "passed": {"type": "boolean"},
                    "absolute": {"type": "boolean"},
                },
            },
        },
    },
}

_BY_SIZE = {"type": "object", "additionalProperties": {"type": "object",
                                                        "additionalProperties": _NUM}}

#: JSON Schema (draft 2020-12) of ``BenchReport.to_dict()``.
BENCH_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "BenchReport",
    "type": "object",
    "required": ["distribution", "params", "methods", "sizes", "repetitions", "baseline",
                 "seconds", "factors", "seed", "machine", "build_id"],
    "properties": {
        "distribution": {"type": "string"},
        "params": {"type": "object"},
        "methods": {"type": "array", "items": {"type": "string"}},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "repetitions": {"type": "integer", "minimum": 3},
        "baseline": {"type": "string"},
        "seconds": _BY_SIZE,
        "factors": _BY_SIZE,
        "seed": {"type": "integer", "minimum": 0},
        "machine": {"type": "string"},
        "build_id": {"type": "string"},
    },
}
