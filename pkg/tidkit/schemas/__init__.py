"""Schema helpers for tidkit."""

from tidkit.schemas.loader import load_schema, validate_instance

__all__ = ["load_schema", "validate_instance"]
