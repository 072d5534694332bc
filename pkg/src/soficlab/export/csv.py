from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, Sequence

import polars as pl
import pyarrow as pa

logger = logging.getLogger(__name__)

TRACE_SCHEMA = pa.schema(
    [
        ("index", pa.int64()),
        ("n", pa.int64()),
        ("fit_lower", pa.float64()),
        ("fit_upper", pa.float64()),
        ("pass", pa.bool_()),
    ]
)


def _rows(trace: Mapping[str, Any] | Sequence[Mapping[str, Any]]) -> list[Mapping[str, Any]]:
    if isinstance(trace, Mapping):
        if "rows" not in trace:
            raise ValueError("Trace payload has no 'rows'")
        return list(trace["rows"])
    return list(trace)


def trace_frame(trace: Mapping[str, Any] | Sequence[Mapping[str, Any]]) -> pl.DataFrame:
    """Trace rows as a frame with the fixed column order of TRACE_SCHEMA.

    Accepts a trace payload ({"rows": [...]}) or the rows themselves.
    """
    rows = [{name: row[name] for name in TRACE_SCHEMA.names} for row in _rows(trace)]
    return pl.from_arrow(pa.Table.from_pylist(rows, schema=TRACE_SCHEMA))  # type: ignore[return-value]


def emit_csv(trace: Mapping[str, Any] | Sequence[Mapping[str, Any]], path: str | Path) -> Path:
    """Write trace rows as UTF-8 CSV with LF line endings; an empty trace writes the header only."""
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(trace).write_csv(output, line_terminator="\n")
    logger.info(f"Wrote trace CSV to {output}")
    return output


def read_trace_csv(path: str | Path) -> pl.DataFrame:
    """Read a CSV written by `emit_csv` back with its schema."""
    return pl.read_csv(path, schema=pl.from_arrow(TRACE_SCHEMA.empty_table()).schema)
