"""Deterministic offline stand-ins for the embedding and chat services."""

from __future__ import annotations

import hashlib
import re
import threading
from typing import Callable, Mapping, Sequence

import numpy as np

from tidkit.errors import PreconditionError
from tidkit.services.base import EmbeddingClient, GenerationClient, check_texts
from tidkit.services.models import EmbeddingVector, GenerationRequest

_TOKEN = re.compile(r"[a-z0-9]+")


def _digest(text: str) -> int:
    return int(hashlib.sha256(text.encode("utf-8")).hexdigest()[:16], 16)


class MockGenerator(GenerationClient):
    """Hash ``user_text`` to pick a starting row, then cycle through the table.

    The same request always yields the same list. Rows are taken in table
    order starting at ``hash % len(table)`` and wrap around.
    """

    def __init__(self, table: Mapping[str, str] | Sequence[str]):
        rows = list(table.values()) if isinstance(table, Mapping) else list(table)
        if not rows:
            raise PreconditionError("Mock table must have at least one entry")
        self.rows = rows
        self.calls = 0
        self._lock = threading.Lock()

    def generate(self, request: GenerationRequest) -> list[str]:
        with self._lock:
            self.calls += 1
        start = _digest(request.user_text) % len(self.rows)
        return [
            self.rows[(start + i) % len(self.rows)]
            for i in range(request.num_return_sequences)
        ]


class OracleMockGenerator(GenerationClient):
    """Answer from a keyed table of ranked responses.

    ``key_fn`` maps a request to a table key (default: the user text). Keys
    missing from the table fall back to hash-selection over every response.
    Short rows are padded by cycling the fallback table.
    """

    def __init__(
        self,
        responses: Mapping[str, Sequence[str]],
        key_fn: Callable[[GenerationRequest], str | None] | None = None,
    ):
        self.responses = {k: list(v) for k, v in responses.items()}
        self.key_fn = key_fn or (lambda request: request.user_text)
        fallback = [r for rows in self.responses.values() for r in rows]
        self._fallback = MockGenerator(fallback or ["Unknown"])

    def generate(self, request: GenerationRequest) -> list[str]:
        key = self.key_fn(request)
        rows = self.responses.get(key, []) if key is not None else []
        wanted = request.num_return_sequences
        if len(rows) >= wanted:
            return rows[:wanted]
        return rows + self._fallback.generate(request)[: wanted - len(rows)]


class CorruptingGenerator(GenerationClient):
    """Wrap a generator and replace the last term of candidate ``position``."""

    def __init__(
        self,
        inner: GenerationClient,
        position: int = -1,
        replacement: str = "Hallucinated-Term",
    ):
        self.inner = inner
        self.position = position
        self.replacement = replacement

    def generate(self, request: GenerationRequest) -> list[str]:
        outputs = list(self.inner.generate(request))
        if outputs:
            terms = [t.strip() for t in outputs[self.position].split(",")]
            terms[-1] = self.replacement
            outputs[self.position] = ", ".join(terms)
        return outputs


class HashingEmbedder(EmbeddingClient):
    """Signed feature hashing of lowercase word tokens, L2-normalized."""

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise PreconditionError("dim must be >= 1")
        self.dim = dim

    def _embed(self, text: str) -> EmbeddingVector:
        vector = np.zeros(self.dim)
        for token in _TOKEN.findall(text.lower()):
            h = _digest(token)
            vector[h % self.dim] += 1.0 if (h >> 20) & 1 else -1.0
        norm = np.linalg.norm(vector)
        if norm == 0:
            vector[_digest(text) % self.dim] = 1.0
            norm = 1.0
        return EmbeddingVector.of(vector / norm)

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        check_texts(texts)
        return [self._embed(t) for t in texts]
