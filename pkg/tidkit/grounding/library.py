"""Candidate library: exact-string and positional indexes over item TIDs."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Mapping

from tidkit.ctg.terms import TermIdSequence
from tidkit.errors import PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Collision:
    tid: str
    item_ids: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"tid": self.tid, "item_ids": list(self.item_ids)}


@dataclass(frozen=True)
class CandidateLibrary:
    """Immutable dual index. Posting lists are ordered best-first
    (popularity descending, then item_id)."""

    item_tids: dict[str, TermIdSequence]
    popularity: dict[str, int]
    direct_index: dict[str, tuple[str, ...]]
    positional_index: dict[tuple[int, str], tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.item_tids)

    @property
    def tid_length(self) -> int:
        return max(len(t) for t in self.item_tids.values())

    def pop(self, item_id: str) -> int:
        return self.popularity.get(item_id, 0)

    def rank_key(self, item_id: str) -> tuple[int, str]:
        return (-self.pop(item_id), item_id)

    def collisions(self) -> list[Collision]:
        return [
            Collision(tid=key, item_ids=tuple(sorted(ids)))
            for key, ids in sorted(self.direct_index.items())
            if len(ids) > 1
        ]


def build_library(
    tids: Mapping[str, TermIdSequence], popularity: Mapping[str, int] | None = None
) -> CandidateLibrary:
    """Index every item TID by canonical string and by (position, term)."""
    if not tids:
        raise PreconditionError("Cannot build a library from an empty TID map")
    popularity = {i: int((popularity or {}).get(i, 0)) for i in tids}

    def best_first(ids: list[str]) -> tuple[str, ...]:
        return tuple(sorted(ids, key=lambda i: (-popularity[i], i)))

    direct: dict[str, list[str]] = defaultdict(list)
    positional: dict[tuple[int, str], list[str]] = defaultdict(list)
    for item_id, tid in tids.items():
        direct[tid.canonical()].append(item_id)
        for position, term in enumerate(tid.terms):
            positional[(position, term)].append(item_id)

    library = CandidateLibrary(
        item_tids=dict(sorted(tids.items())),
        popularity=popularity,
        direct_index={k: best_first(v) for k, v in sorted(direct.items())},
        positional_index={k: best_first(v) for k, v in sorted(positional.items())},
    )
    collisions = library.collisions()
    if collisions:
        logger.warning(
            "%d TID collisions covering %d items",
            len(collisions),
            sum(len(c.item_ids) for c in collisions),
        )
    return library
