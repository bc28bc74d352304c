"""Secret handling."""

from tidkit.security.redaction import Redactor

__all__ = ["Redactor"]
