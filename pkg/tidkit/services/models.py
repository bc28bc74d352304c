"""Service request/response types."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from tidkit.errors import PreconditionError, ProtocolError


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ProtocolError("Embedding vector is empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ProtocolError("Embedding vector has non-finite values")

    @property
    def dim(self) -> int:
        return len(self.values)

    @classmethod
    def of(cls, values: Sequence[float]) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class GenerationRequest:
    system_text: str
    user_text: str
    max_new_tokens: int = 30
    num_return_sequences: int = 1
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.max_new_tokens < 1:
            raise PreconditionError("max_new_tokens must be >= 1")
        if self.num_return_sequences < 1:
            raise PreconditionError("num_return_sequences must be >= 1")
        if self.temperature < 0:
            raise PreconditionError("temperature must be >= 0")

    def messages(self) -> list[dict[str, str]]:
        return [
            {"role": "system", "content": self.system_text},
            {"role": "user", "content": self.user_text},
        ]
