"""
Trace import/export
CSV (time,p_estimate,shots) and JSON (schema_version 1) measurement records
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np

from ..utils.errors import TraceFormatError, TraceValidationError
from .experiment_sim import MeasurementTrace, TraceMeta

logger = logging.getLogger(__name__)

CSV_HEADER = ["time", "p_estimate", "shots"]
SCHEMA_VERSION = 1
FORMATS = ("csv", "json")


def infer_format(path, fmt: Optional[str] = None) -> str:
    """Pick 'csv' or 'json' from an explicit override or the file extension"""
    if fmt:
        fmt = fmt.lower()
        if fmt not in FORMATS:
            raise ValueError(f"Unknown trace format '{fmt}'. Must be one of: {', '.join(FORMATS)}")
        return fmt
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix not in FORMATS:
        raise ValueError(f"Cannot infer trace format from '{path}'; use a .csv/.json extension or --format")
    return suffix


def _number(value: float) -> str:
    # repr round-trips every float exactly
    return repr(float(value))


def trace_to_csv_text(trace: MeasurementTrace) -> str:
    """
    Render a trace as CSV

    Raises:
        TraceValidationError: For exact traces; CSV has no place for the exact
            flag and their estimates are off the shot lattice, so use JSON
    """
    if trace.exact:
        raise TraceValidationError("exact (noiseless) traces cannot be written as CSV; use JSON")
    lines = [",".join(CSV_HEADER)]
    for t, p, n in zip(trace.times, trace.estimates, trace.shots):
        lines.append(f"{_number(t)},{_number(p)},{int(n)}")
    return "\n".join(lines) + "\n"


def trace_to_json_dict(trace: MeasurementTrace) -> dict:
    meta = trace.meta.to_dict() if trace.meta is not None else {}
    if trace.exact:
        meta["exact"] = True
    return {
        "schema_version": SCHEMA_VERSION,
        "meta": meta,
        "points": [
            {"t": float(t), "p": float(p), "shots": int(n)}
            for t, p, n in zip(trace.times, trace.estimates, trace.shots)
        ],
    }


def export_trace(trace: MeasurementTrace, path, fmt: Optional[str] = None) -> None:
    """
    Write a trace to disk

    Args:
        trace: Trace to write
        path: Destination file
        fmt: 'csv' or 'json'; inferred from the extension when omitted

    Raises:
        TraceValidationError: Exact traces requested as CSV (nothing is written)
    """
    path = Path(path)
    fmt = infer_format(path, fmt)
    if fmt == "csv":
        try:
            text = trace_to_csv_text(trace)
        except TraceValidationError as e:
            raise TraceValidationError(f"{path}: {e}")
    else:
        text = json.dumps(trace_to_json_dict(trace), indent=2) + "\n"
    path.write_text(text, encoding="utf-8")
    logger.info(f"[IO] Wrote {len(trace)} points to {path} ({fmt})")


def _parse_float(path, raw: str, line: int, field: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TraceFormatError(path, f"not a number: {raw!r}", line, field)
    if not math.isfinite(value):
        raise TraceFormatError(path, f"not finite: {raw!r}", line, field)
    return value


def _parse_shots(path, raw, line: int, field: str = "shots") -> int:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TraceFormatError(path, f"not an integer: {raw!r}", line, field)
    if not value.is_integer() or value < 1:
        raise TraceFormatError(path, f"shots must be a positive integer, got {raw!r}", line, field)
    return int(value)


def _read_csv(path: Path) -> MeasurementTrace:
    times, estimates, shots = [], [], []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(path, "file is empty", 1)
        if [cell.strip() for cell in header] != CSV_HEADER:
            raise TraceFormatError(path, f"header must be {','.join(CSV_HEADER)}", 1)
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise TraceFormatError(path, f"expected {len(CSV_HEADER)} fields, got {len(row)}", line)
            times.append(_parse_float(path, row[0].strip(), line, "time"))
            estimates.append(_parse_float(path, row[1].strip(), line, "p_estimate"))
            shots.append(_parse_shots(path, row[2].strip(), line))
    if not times:
        raise TraceFormatError(path, "no data rows")
    return MeasurementTrace(np.array(times), np.array(estimates), np.array(shots))


def _read_json(path: Path) -> MeasurementTrace:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise TraceFormatError(path, f"invalid JSON: {e.msg}", e.lineno)
    if not isinstance(data, dict):
        raise TraceFormatError(path, "top level must be an object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise TraceFormatError(path, f"unsupported schema_version {data.get('schema_version')!r}",
                               field="schema_version")
    points = data.get("points")
    if not isinstance(points, list) or not points:
        raise TraceFormatError(path, "points must be a nonempty list", field="points")

    times, estimates, shots = [], [], []
    for index, point in enumerate(points):
        if not isinstance(point, dict):
            raise TraceFormatError(path, f"point {index} must be an object", field="points")
        for key in ("t", "p", "shots"):
            if key not in point:
                raise TraceFormatError(path, f"point {index} is missing '{key}'", field=f"points[{index}].{key}")
        times.append(_parse_float(path, point["t"], None, f"points[{index}].t"))
        estimates.append(_parse_float(path, point["p"], None, f"points[{index}].p"))
        shots.append(_parse_shots(path, point["shots"], None, f"points[{index}].shots"))

    meta_data = dict(data.get("meta") or {})
    exact = bool(meta_data.pop("exact", False))
    try:
        meta = TraceMeta.from_dict(meta_data) if meta_data else None
    except ValueError as e:
        raise TraceFormatError(path, str(e), field="meta")
    return MeasurementTrace(np.array(times), np.array(estimates), np.array(shots), meta, exact=exact)


def import_trace(path, fmt: Optional[str] = None) -> MeasurementTrace:
    """
    Read a trace from disk

    Args:
        path: Source file
        fmt: 'csv' or 'json'; inferred from the extension when omitted

    Returns:
        Validated MeasurementTrace

    Raises:
        TraceFormatError: Malformed file (names line and/or field)
        TraceValidationError: Well-formed file violating trace invariants
        OSError: Unreadable file
    """
    path = Path(path)
    fmt = infer_format(path, fmt)
    try:
        trace = _read_csv(path) if fmt == "csv" else _read_json(path)
    except TraceValidationError as e:
        raise TraceValidationError(f"{path}: {e}")
    logger.info(f"[IO] Read {len(trace)} points from {path} ({fmt})")
    return trace
