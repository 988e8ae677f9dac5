"""
BlochID - Output Formatting
CSV/JSON rendering for plot-ready data and reports
"""

import json
import logging
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np
from pydantic import BaseModel

logger = logging.getLogger(__name__)


def output_format(out: Optional[str], fmt: Optional[str]) -> str:
    """--format wins, then the --out extension, then csv"""
    if fmt:
        return fmt
    if out and Path(out).suffix.lower() == ".json":
        return "json"
    return "csv"


def _number(value: float) -> str:
    return repr(float(value))


def columns_to_csv(columns: Dict[str, Sequence[float]]) -> str:
    """Header row plus one row per sample; floats written with repr so they read back exactly"""
    names = list(columns)
    arrays = [np.asarray(columns[name], dtype=float) for name in names]
    lines = [",".join(names)]
    for row in zip(*arrays):
        lines.append(",".join(_number(value) for value in row))
    return "\n".join(lines) + "\n"


def columns_to_json(columns: Dict[str, Sequence[float]]) -> str:
    data = {name: [float(value) for value in values] for name, values in columns.items()}
    return json.dumps(data, indent=2) + "\n"


def render_columns(columns: Dict[str, Sequence[float]], fmt: str) -> str:
    return columns_to_json(columns) if fmt == "json" else columns_to_csv(columns)


def render_report(report) -> str:
    """Pydantic reports via model_dump_json; plain containers via json.dumps"""
    if isinstance(report, BaseModel):
        return report.model_dump_json(indent=2) + "\n"
    return json.dumps(report, indent=2) + "\n"


def emit(text: str, out: Optional[str] = None) -> None:
    """Write data to --out or standard output"""
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"[CLI] Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
