"""Canonical report serialization with a determinism hash.

Reports never embed wall-clock data, so identical invocations produce
byte-identical JSON. The hash covers the result payload and counters
(not the invocation echo), so it is also stable across --jobs settings.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

SCHEMA_VERSION = 1
TOOL_NAME = "permembed"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def determinism_hash(result, counters) -> str:
    payload = canonical_json({"result": result, "counters": counters})
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_report(command: str, options: dict, result, counters: dict | None = None) -> dict:
    counters = counters or {}
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL_NAME,
        "invocation": {"command": command, "options": options},
        "result": result,
        "counters": counters,
        "determinism_hash": determinism_hash(result, counters),
    }


def report_bytes(report: dict) -> bytes:
    return (canonical_json(report) + "\n").encode("utf-8")


def load_schema() -> dict:
    with resources.files("permembed").joinpath("data/report.schema.json").open() as fh:
        return json.load(fh)


def validate_report(report: dict) -> None:
    """Schema validation; requires the jsonschema package."""
    import jsonschema

    jsonschema.validate(report, load_schema())
