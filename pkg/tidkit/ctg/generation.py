"""Corpus-wide Term-ID generation with exemplar feedback and checkpoints."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from tidkit.corpus.models import Corpus
from tidkit.ctg.neighbors import EmbeddingIndex, NeighborSet, all_neighbors
from tidkit.ctg.prompts import build_ctg_prompt
from tidkit.ctg.terms import TermIdSequence, parse_tid_response
from tidkit.data.store import append_jsonl, iter_jsonl, write_jsonl
from tidkit.errors import PreconditionError, ServiceError, TidParseError
from tidkit.prompts import PromptTemplates
from tidkit.services.base import EmbeddingClient, GenerationClient
from tidkit.services.models import GenerationRequest

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CtgOptions:
    n: int = 5
    k: int = 5
    parse_retries: int = 3
    checkpoint_every: int = 500
    exemplar_feedback: bool = True
    max_in_flight: int = 4
    max_new_tokens: int = 64
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1:
            raise PreconditionError("N and k must be >= 1")
        if self.parse_retries < 1 or self.checkpoint_every < 1:
            raise PreconditionError("parse_retries and checkpoint_every must be >= 1")
        if self.max_in_flight < 1:
            raise PreconditionError("max_in_flight must be >= 1")


@dataclass
class CtgResult:
    tids: dict[str, TermIdSequence]
    failures: dict[str, str] = field(default_factory=dict)
    resumed: int = 0
    generated: int = 0


def embed_corpus(corpus: Corpus, client: EmbeddingClient) -> EmbeddingIndex:
    """Embed every item's metadata_text, in item_id order."""
    ids = sorted(corpus.items)
    vectors = client.embed_batch([corpus.items[i].metadata_text for i in ids])
    logger.info("Embedded %d items (dim=%d)", len(vectors), vectors[0].dim)
    return EmbeddingIndex.from_vectors(dict(zip(ids, vectors)))


def generation_order(corpus: Corpus) -> list[str]:
    """Items by descending interaction count, ties by item_id."""
    popularity = corpus.popularity()
    return sorted(corpus.items, key=lambda item_id: (-popularity[item_id], item_id))


def _load_checkpoint(
    path: Path | None,
) -> tuple[dict[str, TermIdSequence], dict[str, str]]:
    tids: dict[str, TermIdSequence] = {}
    failures: dict[str, str] = {}
    if path is None or not path.exists():
        return tids, failures
    for row in iter_jsonl(path):
        if row.get("terms"):
            tids[row["item_id"]] = TermIdSequence.of(row["terms"])
        else:
            failures[row["item_id"]] = row.get("raw", "")
    logger.info(
        "Resumed %d items (%d failed) from %s", len(tids), len(failures), path
    )
    return tids, failures


class _TidGenerator:
    """Generates one item's TID; shared read-only across worker threads."""

    def __init__(
        self,
        corpus: Corpus,
        neighbors: Mapping[str, NeighborSet],
        client: GenerationClient,
        options: CtgOptions,
        templates: PromptTemplates | None,
    ):
        self.corpus = corpus
        self.neighbors = neighbors
        self.client = client
        self.options = options
        self.templates = templates

    def request_for(
        self, item_id: str, exemplars: Mapping[str, TermIdSequence]
    ) -> GenerationRequest:
        neighbor_records = [
            self.corpus.items[j]
            for j in self.neighbors[item_id].ids
            if j in self.corpus.items
        ]
        system_text, user_text = build_ctg_prompt(
            self.corpus.items[item_id],
            neighbor_records,
            self.options.n,
            neighbor_tids=exemplars,
            templates=self.templates,
        )
        return GenerationRequest(
            system_text=system_text,
            user_text=user_text,
            max_new_tokens=self.options.max_new_tokens,
            temperature=self.options.temperature,
        )

    def __call__(
        self, item_id: str, exemplars: Mapping[str, TermIdSequence]
    ) -> tuple[TermIdSequence | None, str]:
        request = self.request_for(item_id, exemplars)
        raw = ""
        for attempt in range(1, self.options.parse_retries + 1):
            outputs = self.client.generate(request)
            raw = outputs[0] if outputs else ""
            try:
                return parse_tid_response(raw, self.options.n), raw
            except TidParseError as exc:
                logger.debug(
                    "Item %s attempt %d: %s (%r)", item_id, attempt, exc.reason, raw
                )
        return None, raw


def generate_all_tids(
    corpus: Corpus,
    index: EmbeddingIndex,
    client: GenerationClient,
    options: CtgOptions | None = None,
    checkpoint_path: Path | str | None = None,
    failures_path: Path | str | None = None,
    templates: PromptTemplates | None = None,
) -> CtgResult:
    """Generate a Term ID for every corpus item.

    Items run in popularity order, in batches of ``max_in_flight``. Each batch
    sees the TIDs assigned before it started as neighbor exemplars. Progress is
    appended to the checkpoint every ``checkpoint_every`` items and on a fatal
    service error, which is then re-raised. Items whose responses never parse
    are recorded as failures and skipped.
    """
    options = options or CtgOptions()
    missing = [item_id for item_id in corpus.items if item_id not in index]
    if missing:
        raise PreconditionError(
            f"{len(missing)} items have no embedding (first: {sorted(missing)[0]})"
        )
    ckpt = Path(checkpoint_path) if checkpoint_path is not None else None
    tids, failures = _load_checkpoint(ckpt)
    result = CtgResult(tids=tids, failures=failures, resumed=len(tids) + len(failures))

    pending = [
        item_id
        for item_id in generation_order(corpus)
        if item_id not in tids and item_id not in failures
    ]
    generator = _TidGenerator(
        corpus, all_neighbors(index, options.k), client, options, templates
    )
    unflushed: list[dict[str, Any]] = []

    def flush() -> None:
        if ckpt is not None and unflushed:
            append_jsonl(ckpt, unflushed)
        unflushed.clear()
        if failures_path is not None:
            write_jsonl(
                failures_path,
                ({"item_id": i, "raw": failures[i]} for i in sorted(failures)),
            )

    pos = 0
    with ThreadPoolExecutor(max_workers=options.max_in_flight) as pool:
        while pos < len(pending):
            room = options.checkpoint_every - len(unflushed)
            batch = pending[pos : pos + min(options.max_in_flight, room)]
            snapshot = dict(tids) if options.exemplar_feedback else {}
            futures = [(i, pool.submit(generator, i, snapshot)) for i in batch]
            try:
                for item_id, future in futures:
                    tid, raw = future.result()
                    if tid is None:
                        failures[item_id] = raw
                        unflushed.append(
                            {"item_id": item_id, "terms": None, "raw": raw}
                        )
                        logger.warning("No parseable TID for item %s", item_id)
                    else:
                        tids[item_id] = tid
                        unflushed.append(
                            {"item_id": item_id, "terms": list(tid.terms)}
                        )
                    result.generated += 1
            except ServiceError:
                logger.error(
                    "Generation aborted; checkpointing %d items", len(unflushed)
                )
                flush()
                raise
            pos += len(batch)
            if len(unflushed) >= options.checkpoint_every:
                flush()
                logger.info(
                    "Checkpoint: %d/%d items done",
                    len(tids) + len(failures),
                    len(corpus.items),
                )
    flush()
    logger.info(
        "Generated TIDs for %d items, %d failures", len(tids), len(failures)
    )
    return result
