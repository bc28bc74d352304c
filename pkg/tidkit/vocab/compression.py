"""Semantic compression of the term vocabulary onto K Core Terms."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from tidkit.ctg.neighbors import EmbeddingIndex
from tidkit.ctg.terms import TermIdSequence
from tidkit.data.store import write_json, write_jsonl
from tidkit.errors import PreconditionError, UncoveredTermError
from tidkit.services.base import EmbeddingClient
from tidkit.vocab.kmeans import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    KMeansResult,
    kmeans,
    squared_distances,
)
from tidkit.vocab.vocabulary import TermVocabulary

logger = logging.getLogger(__name__)


def term_text(term: str) -> str:
    """Embedding input for a term: its words separated by spaces."""
    return term.replace("-", " ")


def embed_terms(vocabulary: TermVocabulary, client: EmbeddingClient) -> EmbeddingIndex:
    terms = vocabulary.terms
    vectors = client.embed_batch([term_text(t) for t in terms])
    return EmbeddingIndex.from_vectors(dict(zip(terms, vectors)))


@dataclass(frozen=True)
class CoreTermMap:
    """Core terms per cluster plus the term -> core term assignment.

    ``centroids`` and ``term_vectors`` back the next-nearest lookup used when
    two terms of one TID land on the same core term.
    """

    core_terms: tuple[str, ...]
    assignment: dict[str, str]
    centroids: np.ndarray
    terms: tuple[str, ...]
    term_vectors: np.ndarray

    def __post_init__(self) -> None:
        if len(set(self.core_terms)) != len(self.core_terms):
            raise PreconditionError("Core terms must be distinct")

    @property
    def k(self) -> int:
        return len(self.core_terms)

    def member_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(self.core_terms, 0)
        for core in self.assignment.values():
            counts[core] += 1
        return counts

    def ranked_cores(self, term: str) -> list[str]:
        """Core terms nearest-first for ``term``; its own core leads."""
        if term not in self.assignment:
            raise UncoveredTermError(term)
        row = self.terms.index(term)
        d2 = squared_distances(self.term_vectors[row : row + 1], self.centroids)[0]
        own = self.assignment[term]
        others = sorted(
            (c for c in range(self.k) if self.core_terms[c] != own),
            key=lambda c: (d2[c], self.core_terms[c]),
        )
        return [own] + [self.core_terms[c] for c in others]


def build_core_term_map(
    term_index: EmbeddingIndex,
    k: int,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> tuple[CoreTermMap, KMeansResult]:
    """Cluster term embeddings and name each cluster by its nearest member term."""
    terms = tuple(term_index.ids)
    points = term_index.raw
    result = kmeans(points, k, seed=seed, max_iters=max_iters, tol=tol)
    d2 = np.sum((points - result.centroids[result.labels]) ** 2, axis=1)

    core_terms = []
    for cluster in range(k):
        members = np.flatnonzero(result.labels == cluster)
        # members are in sorted term order, so argmin breaks ties by name
        core_terms.append(terms[members[np.argmin(d2[members])]])
    assignment = {t: core_terms[result.labels[i]] for i, t in enumerate(terms)}
    logger.info(
        "Compressed %d terms onto %d core terms (objective %.6g, %d iterations)",
        len(terms),
        k,
        result.objective,
        result.iterations,
    )
    core_map = CoreTermMap(
        core_terms=tuple(core_terms),
        assignment=assignment,
        centroids=result.centroids,
        terms=terms,
        term_vectors=points,
    )
    return core_map, result


def compress_tids(
    tids: Mapping[str, TermIdSequence], core_map: CoreTermMap
) -> dict[str, TermIdSequence]:
    """Substitute every term by its core term, position by position.

    A core term already used earlier in the same TID is replaced by the
    term's next-nearest unused core term, so lengths are preserved.
    """
    longest = max((len(t) for t in tids.values()), default=0)
    if longest > core_map.k:
        raise PreconditionError(
            f"K={core_map.k} core terms cannot fill a TID of length {longest}"
        )
    compressed: dict[str, TermIdSequence] = {}
    replaced = 0
    for item_id, tid in tids.items():
        used: list[str] = []
        for term in tid.terms:
            if term not in core_map.assignment:
                raise UncoveredTermError(term)
            core = core_map.assignment[term]
            if core in used:
                core = next(c for c in core_map.ranked_cores(term) if c not in used)
                replaced += 1
            used.append(core)
        compressed[item_id] = TermIdSequence(tuple(used))
    if replaced:
        logger.info("Replaced %d duplicate core terms with next-nearest", replaced)
    return compressed


def write_compression_outputs(
    core_terms_path: Path | str,
    meta_path: Path | str,
    core_map: CoreTermMap,
    result: KMeansResult,
    seed: int,
    vocabulary_size: int,
    extra: Mapping[str, Any] | None = None,
) -> None:
    counts = core_map.member_counts()
    write_jsonl(
        core_terms_path,
        ({"core_term": c, "members": counts[c]} for c in sorted(counts)),
    )
    meta = {
        "k": core_map.k,
        "seed": seed,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_objective": result.objective,
        "vocabulary_size": vocabulary_size,
    }
    meta.update(extra or {})
    write_json(meta_path, meta)
