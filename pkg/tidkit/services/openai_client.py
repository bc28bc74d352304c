"""Clients for OpenAI-compatible chat-completion and embeddings endpoints.

Any server speaking the ``/v1/chat/completions`` and ``/v1/embeddings`` shapes
works; point ``ServiceConfig.base_url`` at it. Retries cover transport
failures, 429 and 5xx; everything else fails immediately.
"""

from __future__ import annotations

import json
import logging
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence, TypeVar

import openai

from tidkit.config import ServiceConfig
from tidkit.errors import (
    EmbeddingBatchError,
    FatalServiceError,
    GenerationError,
    ProtocolError,
    TransportError,
)
from tidkit.security.redaction import Redactor
from tidkit.services.base import (
    EmbeddingClient,
    GenerationClient,
    check_dims,
    check_texts,
)
from tidkit.services.models import EmbeddingVector, GenerationRequest

logger = logging.getLogger(__name__)

T = TypeVar("T")

BACKOFF_INITIAL = 1.0
BACKOFF_FACTOR = 2.0
BACKOFF_CAP = 30.0
DEFAULT_CHAT_MODEL = "gpt-4o-mini"
DEFAULT_EMBEDDING_MODEL = "text-embedding-3-small"


def backoff_delay(attempt: int, rng: random.Random) -> float:
    """Jittered exponential delay before retry ``attempt`` (0-based)."""
    ceiling = min(BACKOFF_CAP, BACKOFF_INITIAL * BACKOFF_FACTOR**attempt)
    return rng.uniform(ceiling / 2, ceiling)


def is_retryable(exc: BaseException) -> bool:
    if isinstance(exc, (openai.APIConnectionError, TimeoutError, ConnectionError)):
        return True
    status = getattr(exc, "status_code", None)
    if isinstance(status, int):
        return status == 429 or status >= 500
    return False


class _RetryingClient:
    """Shared plumbing: lazy SDK client, in-flight bound, retries, redacted logs."""

    default_model = ""

    def __init__(
        self,
        config: ServiceConfig,
        sdk_client: Any | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.config = config
        self.model = config.model or self.default_model
        self._client = sdk_client
        self._client_lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._redactor = Redactor(secrets=[config.api_key() or ""])

    def _get_client(self) -> Any:
        with self._client_lock:
            if self._client is None:
                api_key = self.config.api_key()
                if api_key is None and self.config.base_url is None:
                    raise FatalServiceError(
                        f"Missing API key: set {self.config.api_key_env_name}"
                    )
                self._client = openai.OpenAI(
                    api_key=api_key or "unused",
                    base_url=self.config.base_url,
                    timeout=self.config.request_timeout,
                    max_retries=0,
                )
            return self._client

    def _log_payload(self, endpoint: str, payload: dict[str, Any]) -> None:
        if logger.isEnabledFor(logging.DEBUG):
            body = self._redactor.redact_text(json.dumps(payload, ensure_ascii=False))
            logger.debug("POST %s %s", endpoint, body)

    def _call(self, endpoint: str, fn: Callable[[], T]) -> T:
        last_error: BaseException | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                with self._slots:
                    return fn()
            except (ProtocolError, FatalServiceError):
                raise
            except Exception as exc:
                message = self._redactor.redact_text(str(exc))
                if not is_retryable(exc):
                    raise FatalServiceError(
                        f"{endpoint} failed: {message}",
                        status_code=getattr(exc, "status_code", None),
                    ) from exc
                last_error = exc
                if attempt == self.config.max_retries:
                    break
                delay = backoff_delay(attempt, self._rng)
                logger.warning(
                    "%s attempt %d/%d failed (%s); retrying in %.1fs",
                    endpoint,
                    attempt + 1,
                    self.config.max_retries + 1,
                    message,
                    delay,
                )
                self._sleep(delay)
        raise TransportError(
            f"{endpoint} failed after {self.config.max_retries + 1} attempts: "
            f"{self._redactor.redact_text(str(last_error))}"
        )


class OpenAIEmbeddingClient(_RetryingClient, EmbeddingClient):
    default_model = DEFAULT_EMBEDDING_MODEL

    def __init__(self, config: ServiceConfig, batch_size: int = 64, **kwargs: Any):
        super().__init__(config, **kwargs)
        self.batch_size = batch_size

    def _embed_chunk(self, chunk: Sequence[str]) -> list[EmbeddingVector]:
        payload = {"model": self.model, "input": list(chunk)}
        self._log_payload("/v1/embeddings", payload)
        response = self._call(
            "embeddings", lambda: self._get_client().embeddings.create(**payload)
        )
        data = sorted(response.data, key=lambda d: d.index)
        if len(data) != len(chunk):
            raise ProtocolError(
                f"Expected {len(chunk)} embeddings, service returned {len(data)}"
            )
        return [EmbeddingVector.of(d.embedding) for d in data]

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        check_texts(texts)
        starts = list(range(0, len(texts), self.batch_size))
        results: dict[int, list[EmbeddingVector]] = {}
        failed: list[int] = []
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            futures = {
                start: pool.submit(
                    self._embed_chunk, texts[start : start + self.batch_size]
                )
                for start in starts
            }
            for start, future in futures.items():
                try:
                    results[start] = future.result()
                except TransportError:
                    end = min(start + self.batch_size, len(texts))
                    failed.extend(range(start, end))
        if failed:
            raise EmbeddingBatchError(
                f"{len(failed)} of {len(texts)} texts could not be embedded", failed
            )
        vectors = [v for start in starts for v in results[start]]
        check_dims(vectors)
        return vectors


class OpenAIChatClient(_RetryingClient, GenerationClient):
    default_model = DEFAULT_CHAT_MODEL

    def generate(self, request: GenerationRequest) -> list[str]:
        wanted = request.num_return_sequences
        outputs: list[str] = []
        # Some servers ignore ``n``; top up with further calls.
        for _ in range(wanted):
            payload = {
                "model": self.model,
                "messages": request.messages(),
                "n": wanted - len(outputs),
                "max_tokens": request.max_new_tokens,
                "temperature": request.temperature,
            }
            self._log_payload("/v1/chat/completions", payload)
            try:
                response = self._call(
                    "chat.completions",
                    lambda: self._get_client().chat.completions.create(**payload),
                )
            except TransportError as exc:
                raise GenerationError(str(exc)) from exc
            choices = sorted(response.choices, key=lambda c: c.index)
            if not choices:
                raise ProtocolError("Chat completion returned no choices")
            outputs.extend((c.message.content or "") for c in choices)
            if len(outputs) >= wanted:
                break
        return outputs[:wanted]
