from soficlab.export.csv import TRACE_SCHEMA, emit_csv, read_trace_csv, trace_frame
from soficlab.export.report import RunReport, canonical_json, config_digest, write_report

__all__ = [
    "RunReport",
    "TRACE_SCHEMA",
    "canonical_json",
    "config_digest",
    "emit_csv",
    "read_trace_csv",
    "trace_frame",
    "write_report",
]
