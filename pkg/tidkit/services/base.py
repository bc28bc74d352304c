"""Service client interfaces."""

from __future__ import annotations

import abc
from typing import Sequence

from tidkit.errors import PreconditionError, ProtocolError
from tidkit.services.models import EmbeddingVector, GenerationRequest


class EmbeddingClient(abc.ABC):
    """Turns texts into dense vectors."""

    @abc.abstractmethod
    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        """Embed ``texts``; output i corresponds to input i, dims uniform."""


class GenerationClient(abc.ABC):
    """Produces ranked candidate completions for a prompt."""

    @abc.abstractmethod
    def generate(self, request: GenerationRequest) -> list[str]:
        """Return ``request.num_return_sequences`` strings, best first."""


def check_texts(texts: Sequence[str]) -> None:
    if not texts:
        raise PreconditionError("embed_batch needs at least one text")
    for index, text in enumerate(texts):
        if not text or not text.strip():
            raise PreconditionError(f"Text at index {index} is empty")


def check_dims(vectors: Sequence[EmbeddingVector]) -> None:
    dims = {v.dim for v in vectors}
    if len(dims) > 1:
        raise ProtocolError(f"Inconsistent embedding dimensions: {sorted(dims)}")
