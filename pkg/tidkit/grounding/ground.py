"""Dual-track grounding of generated Term-ID sequences to catalog items.

Direct track: exact canonical-string lookup. Structural track: the item
maximizing sum_j w_j * [generated term j == item term j] with
w_j = 1 / (j + 1) for 1-based position j, summed over the shorter of the two
sequences. Ties go to the more popular item, then the smaller item_id.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from tidkit.ctg.terms import TermIdSequence, parse_tid_lenient
from tidkit.grounding.library import CandidateLibrary

DIRECT = "direct"
STRUCTURAL = "structural"
NONE = "none"
SCORE_DIGITS = 12


@dataclass(frozen=True)
class GroundingResult:
    item_id: str | None
    track: str
    score: float | None = None

    @property
    def grounded(self) -> bool:
        return self.track != NONE


_MISS = GroundingResult(item_id=None, track=NONE)


def position_weight(position: int) -> float:
    """Weight of 0-based ``position``: 1/2, 1/3, 1/4, ..."""
    return 1.0 / (position + 2)


def structural_score(generated: TermIdSequence, tid: TermIdSequence) -> float:
    score = 0.0
    for position, (a, b) in enumerate(zip(generated.terms, tid.terms)):
        if a == b:
            score += position_weight(position)
    return score


def _best(scores: dict[str, float], library: CandidateLibrary) -> GroundingResult:
    if not scores:
        return _MISS
    # distinct weight subsets can tie exactly (1/2 == 1/3 + 1/6)
    best = min(
        scores, key=lambda i: (-round(scores[i], SCORE_DIGITS), *library.rank_key(i))
    )
    return GroundingResult(item_id=best, track=STRUCTURAL, score=scores[best])


def ground_direct(
    generated: TermIdSequence, library: CandidateLibrary
) -> GroundingResult:
    items = library.direct_index.get(generated.canonical())
    if not items:
        return _MISS
    return GroundingResult(item_id=items[0], track=DIRECT)


def ground_structural(
    generated: TermIdSequence, library: CandidateLibrary
) -> GroundingResult:
    """Score only items sharing at least one (position, term) with ``generated``."""
    scores: dict[str, float] = defaultdict(float)
    for position, term in enumerate(generated.terms):
        weight = position_weight(position)
        for item_id in library.positional_index.get((position, term), ()):
            scores[item_id] += weight
    return _best(scores, library)


def ground_structural_brute_force(
    generated: TermIdSequence, library: CandidateLibrary
) -> GroundingResult:
    """Full-library scan; same result as ``ground_structural``."""
    scores = {}
    for item_id, tid in library.item_tids.items():
        score = structural_score(generated, tid)
        if score > 0:
            scores[item_id] = score
    return _best(scores, library)


def ground(
    generated: TermIdSequence, library: CandidateLibrary, brute_force: bool = False
) -> GroundingResult:
    """Direct track first, structural track on a miss."""
    result = ground_direct(generated, library)
    if result.grounded:
        return result
    if brute_force:
        return ground_structural_brute_force(generated, library)
    return ground_structural(generated, library)


@dataclass
class BeamGrounding:
    """Grounded beam: unique items plus per-candidate bookkeeping."""

    items: list[str] = field(default_factory=list)
    validity_flags: list[bool] = field(default_factory=list)
    tracks: list[str] = field(default_factory=list)
    candidate_items: list[str | None] = field(default_factory=list)


def ground_beam(
    candidates: Sequence[str],
    library: CandidateLibrary,
    k: int,
    n: int | None = None,
    brute_force: bool = False,
) -> BeamGrounding:
    """Ground ranked raw candidates into at most ``k`` unique items.

    Each candidate is parsed leniently (1..n terms). A candidate is valid
    when its canonical form after term normalization is a library TID, so
    VR@K counts "phone, 6 inch" as "Phone, 6-Inch". Unparseable or ungrounded
    candidates are skipped; repeated items keep their best rank.
    """
    n = n or library.tid_length
    beam = BeamGrounding()
    seen: set[str] = set()
    for raw in candidates:
        parsed = parse_tid_lenient(raw, n)
        if parsed is None:
            beam.validity_flags.append(False)
            beam.tracks.append(NONE)
            beam.candidate_items.append(None)
            continue
        beam.validity_flags.append(parsed.canonical() in library.direct_index)
        result = ground(parsed, library, brute_force=brute_force)
        beam.tracks.append(result.track)
        beam.candidate_items.append(result.item_id)
        if result.item_id is not None and result.item_id not in seen:
            seen.add(result.item_id)
            beam.items.append(result.item_id)
    beam.items = beam.items[:k]
    return beam
