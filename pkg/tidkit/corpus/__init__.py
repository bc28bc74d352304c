"""Corpus subsystem.

Ingests raw review and metadata dumps, applies k-core filtering, builds
chronological user sequences and leave-one-out / cross-domain splits.
"""

from tidkit.corpus.core import build_corpus
from tidkit.corpus.cross_domain import domain_split, merge_corpora, merge_cross_domain
from tidkit.corpus.filtering import k_core_filter
from tidkit.corpus.ingest import IngestResult, ingest
from tidkit.corpus.io import load_corpus, save_corpus
from tidkit.corpus.models import (
    Corpus,
    CorpusStats,
    InteractionRecord,
    InteractionSequence,
    ItemRecord,
)
from tidkit.corpus.sequences import (
    build_sequences,
    leave_one_out_split,
    truncate_history,
)

__all__ = [
    "Corpus",
    "CorpusStats",
    "IngestResult",
    "InteractionRecord",
    "InteractionSequence",
    "ItemRecord",
    "build_corpus",
    "build_sequences",
    "domain_split",
    "ingest",
    "k_core_filter",
    "leave_one_out_split",
    "load_corpus",
    "merge_corpora",
    "merge_cross_domain",
    "save_corpus",
    "truncate_history",
]
