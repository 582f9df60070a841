"""CSV and JSON readers/writers for data, scatter estimates and reports.

CSV conventions: comma-separated, UTF-8, ``.`` decimal point, one
observation per row, optional single header row.  Parse failures name
the offending line (1-based, header included) and column.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import CsvParseError
from .location import CenterEstimate
from .scatter import ScatterEstimate
from .tuning import TuneResult

# Fixed tag schema of the long-format metric records CSV.
TAG_COLUMNS = (
    "scenario",
    "method",
    "distribution",
    "n",
    "d",
    "s",
    "k",
    "component",
    "replication",
    "repeat",
    "seed",
)


def read_data_csv(path, header: bool = False) -> np.ndarray:
    """Read an observations-by-rows numeric CSV into an (n, d) array."""
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise CsvParseError(
                    f"{path}: line {lineno}: expected {width} fields, got {len(row)}"
                )
            parsed = []
            for col, cell in enumerate(row, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvParseError(
                        f"{path}: line {lineno}, column {col}: "
                        f"not a number: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise CsvParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_data_csv(path, x, header=None) -> None:
    """Write an (n, d) array as CSV, optionally with a header row."""
    x = np.asarray(x, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for row in np.atleast_2d(x):
            writer.writerow([repr(float(v)) for v in row])


def save_scatter(est: ScatterEstimate, csv_path, json_path) -> None:
    """Scatter matrix to CSV plus a JSON sidecar with kind and center."""
    write_data_csv(csv_path, est.matrix)
    doc = {"kind": est.kind, "dim": int(est.matrix.shape[0]), "center": None}
    if est.center is not None:
        doc["center"] = {
            "center": est.center.center.tolist(),
            "method": est.center.method,
            "iterations": est.center.iterations,
            "residual": est.center.residual,
        }
    save_json(doc, json_path)


def load_scatter(csv_path, json_path) -> ScatterEstimate:
    matrix = read_data_csv(csv_path)
    doc = load_json(json_path)
    center = None
    if doc.get("center") is not None:
        c = doc["center"]
        center = CenterEstimate(
            center=np.asarray(c["center"], dtype=float),
            method=c["method"],
            iterations=int(c.get("iterations", 0)),
            residual=float(c.get("residual", 0.0)),
        )
    matrix = (matrix + matrix.T) / 2.0
    return ScatterEstimate(matrix=matrix, kind=doc["kind"], center=center)


def save_json(doc, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_metric_records(path, records) -> None:
    """Long-format records CSV with the fixed tag schema."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("name", "value") + TAG_COLUMNS)
        for rec in records:
            row = [rec.name, repr(float(rec.value))]
            row.extend(_fmt_tag(rec.context.get(tag)) for tag in TAG_COLUMNS)
            writer.writerow(row)


def read_metric_records(path):
    """Round-trip reader for :func:`write_metric_records` output."""
    from .metrics import MetricRecord

    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        head = next(reader, None)
        if head is None or head[:2] != ["name", "value"]:
            raise CsvParseError(f"{path}: not a metric records file")
        tags = head[2:]
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(head):
                raise CsvParseError(
                    f"{path}: line {lineno}: expected {len(head)} fields, got {len(row)}"
                )
            try:
                value = float(row[1])
            except ValueError:
                raise CsvParseError(
                    f"{path}: line {lineno}, column 2: not a number: {row[1]!r}"
                ) from None
            context = {
                tag: _parse_tag(cell) for tag, cell in zip(tags, row[2:]) if cell != ""
            }
            records.append(MetricRecord(name=row[0], value=value, context=context))
    return records


def save_tune_result(result: TuneResult, json_path=None, csv_path=None) -> None:
    """TuneResult to JSON and/or its score table to CSV (wide format)."""
    if json_path is not None:
        save_json(result.to_dict(), json_path)
    if csv_path is not None:
        b = result.split_scores.shape[0]
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "mean_score"] + [f"split_{i}" for i in range(b)])
            for j, k in enumerate(result.candidates):
                row = [k, _fmt_score(result.mean_scores[j])]
                row.extend(_fmt_score(v) for v in result.split_scores[:, j])
                writer.writerow(row)


def _fmt_tag(value) -> str:
    if value is None:
        return ""
    return str(value)


def _parse_tag(cell: str):
    try:
        return int(cell)
    except ValueError:
        try:
            return float(cell)
        except ValueError:
            return cell


def _fmt_score(v) -> str:
    return "" if not np.isfinite(v) else repr(float(v))
