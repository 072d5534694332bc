from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

logger = logging.getLogger(__name__)


def clean_floats(obj: Any) -> Any:
    """Replace non-finite floats by None so reports stay strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, Mapping):
        return {str(k): clean_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_floats(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    """Compact JSON with sorted keys: identical inputs give identical text."""
    return json.dumps(clean_floats(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(config: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


@dataclass
class RunReport:
    """The outcome of one experiment run.

    Everything except `wall_time` is a function of the config alone.
    """

    op: str
    config: dict[str, Any]
    result: dict[str, Any]
    version: str
    wall_time: float

    @property
    def digest(self) -> str:
        return config_digest(self.config)

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": self.op,
            "version": self.version,
            "config_digest": self.digest,
            "config": self.config,
            "result": self.result,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return (
            json.dumps(clean_floats(self.to_dict()), sort_keys=True, indent=2, allow_nan=False)
            + "\n"
        )


def write_report(report: RunReport, path: str | Path) -> Path:
    """Write a report as UTF-8 JSON with LF line endings.

    Args:
        report (RunReport): the report to write.
        path (str | Path): output file; parent directories are created.

    Returns:
        Path: the written file.
    """
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="\n") as f:
        f.write(report.to_json())
    logger.info(f"Wrote {report.op} report to {output}")
    return output
