"""Exact cosine top-k neighbor retrieval over item embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from tidkit.errors import PreconditionError, UndefinedSimilarityError
from tidkit.services.models import EmbeddingVector


def _as_array(vector: EmbeddingVector | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(vector, EmbeddingVector):
        return np.asarray(vector.values, dtype=np.float64)
    return np.asarray(vector, dtype=np.float64)


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|), clipped to [-1, 1]."""
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise PreconditionError(f"Dimension mismatch: {a.shape} vs {b.shape}")
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        raise UndefinedSimilarityError("Cosine similarity undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


@dataclass(frozen=True)
class NeighborSet:
    item_id: str
    neighbors: tuple[tuple[str, float], ...]
    shortfall: bool = False

    @property
    def ids(self) -> list[str]:
        return [item_id for item_id, _ in self.neighbors]


class EmbeddingIndex:
    """Row-normalized embedding matrix with ids kept in sorted order."""

    def __init__(self, ids: Sequence[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(ids):
            raise PreconditionError("Embedding matrix must have one row per id")
        if len(set(ids)) != len(ids):
            raise PreconditionError("Embedding ids must be unique")
        order = np.argsort(np.asarray(ids, dtype=object), kind="stable")
        self.ids = [ids[i] for i in order]
        self.raw = matrix[order]
        norms = np.linalg.norm(self.raw, axis=1)
        if np.any(norms == 0):
            zero = self.ids[int(np.argmax(norms == 0))]
            raise UndefinedSimilarityError(f"Zero-norm embedding for item {zero}")
        self.unit = self.raw / norms[:, None]
        self._position = {item_id: i for i, item_id in enumerate(self.ids)}

    @classmethod
    def from_vectors(cls, vectors: Mapping[str, EmbeddingVector]) -> "EmbeddingIndex":
        ids = list(vectors)
        return cls(ids, np.array([vectors[i].values for i in ids], dtype=np.float64))

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._position

    def position(self, item_id: str) -> int:
        try:
            return self._position[item_id]
        except KeyError:
            raise PreconditionError(f"No embedding for item {item_id}") from None

    def save(self, path: Path | str) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            np.savez(f, ids=np.asarray(self.ids, dtype=str), vectors=self.raw)

    @classmethod
    def load(cls, path: Path | str) -> "EmbeddingIndex":
        with np.load(path, allow_pickle=False) as data:
            return cls([str(i) for i in data["ids"]], data["vectors"])


def _rank(index: EmbeddingIndex, row: int, scores: np.ndarray, k: int) -> NeighborSet:
    candidates = np.delete(np.arange(len(index)), row)
    cand_scores = np.clip(scores[candidates], -1.0, 1.0)
    # ids are sorted, so position order is lexicographic order
    order = np.lexsort((candidates, -cand_scores))[:k]
    neighbors = tuple(
        (index.ids[candidates[i]], float(cand_scores[i])) for i in order
    )
    return NeighborSet(
        item_id=index.ids[row],
        neighbors=neighbors,
        shortfall=len(neighbors) < k,
    )


def top_k_neighbors(item_id: str, index: EmbeddingIndex, k: int) -> NeighborSet:
    """Exact top-k by cosine similarity; ties go to the smaller item_id.

    Fewer than ``k`` other items yields every candidate with ``shortfall`` set.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    row = index.position(item_id)
    return _rank(index, row, index.unit @ index.unit[row], k)


def all_neighbors(
    index: EmbeddingIndex, k: int, chunk_size: int = 1024
) -> dict[str, NeighborSet]:
    """``top_k_neighbors`` for every item, scoring rows in chunks."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    result: dict[str, NeighborSet] = {}
    for start in range(0, len(index), chunk_size):
        block = index.unit[start : start + chunk_size] @ index.unit.T
        for offset, scores in enumerate(block):
            row = start + offset
            result[index.ids[row]] = _rank(index, row, scores, k)
    return result
