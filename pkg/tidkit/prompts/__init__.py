"""Versioned prompt and instruction templates."""

from tidkit.prompts.loader import (
    CtgTemplate,
    InstructionTemplates,
    PromptTemplates,
    load_default_templates,
    load_templates,
)

__all__ = [
    "CtgTemplate",
    "InstructionTemplates",
    "PromptTemplates",
    "load_default_templates",
    "load_templates",
]
