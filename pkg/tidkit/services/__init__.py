"""Service subsystem.

Clients for the external embedding and chat-generation services plus
deterministic mocks for offline runs.
"""

from tidkit.services.base import EmbeddingClient, GenerationClient
from tidkit.services.mock import (
    CorruptingGenerator,
    HashingEmbedder,
    MockGenerator,
    OracleMockGenerator,
)
from tidkit.services.models import EmbeddingVector, GenerationRequest
from tidkit.services.openai_client import OpenAIChatClient, OpenAIEmbeddingClient

__all__ = [
    "CorruptingGenerator",
    "EmbeddingClient",
    "EmbeddingVector",
    "GenerationClient",
    "GenerationRequest",
    "HashingEmbedder",
    "MockGenerator",
    "OpenAIChatClient",
    "OpenAIEmbeddingClient",
    "OracleMockGenerator",
]
