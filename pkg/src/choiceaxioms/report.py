"""Report envelope shared by every CLI command, with schema validation."""

from __future__ import annotations

import datetime as _dt
import json
from typing import Any

import jsonschema

from .exceptions import ValidationError
from .risk import load_schema

SCHEMA_VERSION = 1


def make_report(command: str, config: dict, result: dict, timestamp: bool = True) -> dict:
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }
    if timestamp:
        report["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return report


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, load_schema("report.schema.json"))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"report does not match schema at {path}: {exc.message}") from None


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def strip_timestamp(report: dict) -> dict:
    out = dict(report)
    out.pop("generated_at", None)
    result = out.get("result")
    if isinstance(result, dict) and "elapsed_seconds" in result:
        out["result"] = {k: v for k, v in result.items() if k != "elapsed_seconds"}
    return out
