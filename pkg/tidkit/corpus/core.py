"""Corpus construction: filter, sequence, and restrict items."""

from __future__ import annotations

import logging
from collections import Counter

from tidkit.corpus.filtering import k_core_filter
from tidkit.corpus.ingest import IngestResult
from tidkit.corpus.models import Corpus
from tidkit.corpus.sequences import build_sequences

logger = logging.getLogger(__name__)


def build_corpus(
    result: IngestResult, k: int = 5, domain_tag: str | None = None
) -> Corpus:
    """Run k-core filtering and sequence building over one ingested dataset.

    Items without any surviving interaction are not kept. Duplicate
    (user, item) pairs are kept as distinct interactions; their count is
    recorded in the corpus notes.
    """
    filtered = k_core_filter(result.interactions, k)
    built = build_sequences(filtered)
    used = {item for seq in built.sequences for item in seq.items}
    items = {item.item_id: item for item in result.items if item.item_id in used}

    pair_counts = Counter((r.user_id, r.item_id) for r in filtered)
    duplicates = sum(c - 1 for c in pair_counts.values() if c > 1)

    notes = {
        "k_core": k,
        "duplicate_interactions": "kept",
        "duplicate_pair_count": duplicates,
        "dropped_short_sequences": built.dropped_short,
        "ingestion": result.counters(),
    }
    corpus = Corpus(
        items=dict(sorted(items.items())),
        sequences=built.sequences,
        domain_tags=(domain_tag,) if domain_tag else (),
        notes=notes,
    )
    logger.info("Built corpus %s: %s", domain_tag or "untagged", corpus.stats.to_dict())
    return corpus
