"""Secret redaction for service debug logs."""

from __future__ import annotations

import re

# Bearer headers and common API-key shapes.
SECRET_PATTERNS = [
    r"(?<=Bearer )[A-Za-z0-9._\-]+",
    r"sk-[A-Za-z0-9_\-]{8,}",
    r"(?<=api[_-]key=)[^&\s\"']+",
]

REDACTED = "[REDACTED]"


class Redactor:
    """Masks API keys before text reaches a log line."""

    def __init__(
        self, patterns: list[str] | None = None, secrets: list[str] | None = None
    ):
        self.patterns = patterns or SECRET_PATTERNS
        self.compiled_patterns = [re.compile(p, re.IGNORECASE) for p in self.patterns]
        self.secrets = [s for s in (secrets or []) if s]

    def redact_text(self, text: str) -> str:
        if not text:
            return ""

        redacted = text
        for secret in self.secrets:
            redacted = redacted.replace(secret, REDACTED)
        for pattern in self.compiled_patterns:
            redacted = pattern.sub(REDACTED, redacted)
        return redacted
