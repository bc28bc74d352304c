"""Term vocabulary statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from tidkit.ctg.terms import TermIdSequence
from tidkit.errors import PreconditionError


@dataclass(frozen=True)
class TermVocabulary:
    counts: dict[str, int]

    @property
    def total_unique(self) -> int:
        return len(self.counts)

    @property
    def terms(self) -> list[str]:
        return sorted(self.counts)

    def __contains__(self, term: str) -> bool:
        return term in self.counts


def build_vocabulary(tids: Mapping[str, TermIdSequence]) -> TermVocabulary:
    """Count every term over all positions of all TIDs."""
    if not tids:
        raise PreconditionError("Cannot build a vocabulary from an empty TID map")
    counts: Counter[str] = Counter()
    for tid in tids.values():
        counts.update(tid.terms)
    return TermVocabulary(counts=dict(sorted(counts.items())))
