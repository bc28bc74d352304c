"""Load and validate tidkit JSON schemas."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any

from jsonschema import Draft7Validator

SCHEMA_DIR = Path(__file__).resolve().parent
SCHEMA_MAP = {
    "item_record": "item_record.schema.json",
    "tid_record": "tid_record.schema.json",
    "gti_sample": "gti_sample.schema.json",
    "seq_sample": "seq_sample.schema.json",
    "eval_sample": "eval_sample.schema.json",
    "metrics_report": "metrics_report.schema.json",
}


def load_schema(name: str) -> dict[str, Any]:
    if name not in SCHEMA_MAP:
        raise KeyError(f"Unknown schema name: {name}")
    schema_path = SCHEMA_DIR / SCHEMA_MAP[name]
    return json.loads(schema_path.read_text())


@lru_cache(maxsize=None)
def _validator(name: str) -> Draft7Validator:
    return Draft7Validator(load_schema(name))


def validate_instance(instance: dict[str, Any], schema_name: str) -> None:
    """Validate a JSON-like instance against a named schema.

    Raises jsonschema.ValidationError on failure.
    """
    _validator(schema_name).validate(instance)
