"""Prompt template loading and basic validation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml

PROMPT_DIR = Path(__file__).resolve().parent
DEFAULT_TEMPLATES = "templates_v1.yaml"

_CTG_FIELDS = (
    "system",
    "target_header",
    "neighbors_header",
    "neighbor_header",
    "exemplar_prefix",
    "rules_header",
    "rules",
    "output_header",
    "output",
)
_INSTRUCTION_FIELDS = ("gti", "seq", "eval")


@dataclass(frozen=True)
class CtgTemplate:
    system: str
    target_header: str
    neighbors_header: str
    neighbor_header: str
    exemplar_prefix: str
    rules_header: str
    rules: tuple[str, ...]
    output_header: str
    output: str


@dataclass(frozen=True)
class InstructionTemplates:
    gti: str
    seq: str
    eval: str


@dataclass(frozen=True)
class PromptTemplates:
    version: str
    name: str
    ctg: CtgTemplate
    instructions: InstructionTemplates


def _validate_templates(data: dict[str, Any]) -> None:
    missing = {"version", "name", "ctg", "instructions"} - data.keys()
    if missing:
        raise ValueError(f"Templates missing required fields: {sorted(missing)}")
    for field in _CTG_FIELDS:
        if field not in data["ctg"]:
            raise ValueError(f"CTG template missing field: {field}")
    if not isinstance(data["ctg"]["rules"], list) or not data["ctg"]["rules"]:
        raise ValueError("CTG rules must be a non-empty list")
    for field in _INSTRUCTION_FIELDS:
        if field not in data["instructions"]:
            raise ValueError(f"Instruction template missing field: {field}")


def load_templates(path: Path | str) -> PromptTemplates:
    """Load a template YAML file and return typed templates."""
    path = Path(path)
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("Template file must parse to a mapping")
    _validate_templates(data)

    ctg = data["ctg"]
    return PromptTemplates(
        version=str(data["version"]),
        name=str(data["name"]),
        ctg=CtgTemplate(
            rules=tuple(str(r) for r in ctg["rules"]),
            **{f: str(ctg[f]) for f in _CTG_FIELDS if f != "rules"},
        ),
        instructions=InstructionTemplates(
            **{f: str(data["instructions"][f]).strip() for f in _INSTRUCTION_FIELDS}
        ),
    )


@lru_cache(maxsize=None)
def load_default_templates() -> PromptTemplates:
    """Load the templates bundled with the package."""
    return load_templates(PROMPT_DIR / DEFAULT_TEMPLATES)
