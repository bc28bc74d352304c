"""Recommendation and hallucination metrics over grounded beams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from tidkit.errors import PreconditionError
from tidkit.grounding.ground import DIRECT, NONE


@dataclass(frozen=True)
class RankedPrediction:
    user_id: str
    target_item_id: str
    grounded_items: tuple[str, ...] = ()
    raw_candidates: tuple[str, ...] = ()
    validity_flags: tuple[bool, ...] = ()
    tracks: tuple[str, ...] = ()
    domain: str | None = None
    generation_failed: bool = False

    def __post_init__(self) -> None:
        if len(set(self.grounded_items)) != len(self.grounded_items):
            raise PreconditionError("grounded_items must be deduplicated")
        if len(self.validity_flags) != len(self.raw_candidates) or len(
            self.tracks
        ) != len(self.raw_candidates):
            raise PreconditionError("Flags and tracks must align with candidates")

    def rank(self) -> int | None:
        """1-based rank of the target among grounded items."""
        try:
            return self.grounded_items.index(self.target_item_id) + 1
        except ValueError:
            return None


def _check_k(k: int) -> None:
    if k < 1:
        raise PreconditionError("K must be >= 1")


def recall_at_k(grounded_items: Sequence[str], target: str, k: int) -> int:
    _check_k(k)
    return int(target in grounded_items[:k])


def ndcg_at_k(grounded_items: Sequence[str], target: str, k: int) -> float:
    """Single relevant item, so IDCG is 1."""
    _check_k(k)
    head = list(grounded_items[:k])
    if target not in head:
        return 0.0
    return 1.0 / math.log2(head.index(target) + 2)


def _ratio(numerators: list[int], denominators: list[int], pooled: bool) -> float:
    if pooled:
        total = sum(denominators)
        return sum(numerators) / total if total else 0.0
    rates = [n / d if d else 0.0 for n, d in zip(numerators, denominators)]
    return float(np.mean(rates)) if rates else 0.0


def valid_rate_at_k(
    predictions: Sequence[RankedPrediction], k: int, pooled: bool = False
) -> float:
    """Share of the first K candidates that are exact library TIDs.

    Users with fewer than K candidates use the available count; a failed
    generation counts as a user with rate 0.
    """
    _check_k(k)
    valid, total = [], []
    for p in predictions:
        flags = p.validity_flags[:k]
        valid.append(sum(flags))
        total.append(len(flags))
    return _ratio(valid, total, pooled)


def direct_hit_rate_at_k(
    predictions: Sequence[RankedPrediction], k: int, pooled: bool = False
) -> float:
    """Share of successful groundings in the first K handled by the direct track.

    Users with no successful grounding are left out of the average unless
    their generation failed, in which case they count as 0.
    """
    _check_k(k)
    direct, grounded = [], []
    for p in predictions:
        tracks = [t for t in p.tracks[:k] if t != NONE]
        if not tracks and not p.generation_failed:
            continue
        direct.append(sum(t == DIRECT for t in tracks))
        grounded.append(len(tracks))
    return _ratio(direct, grounded, pooled)


@dataclass
class MetricsReport:
    recall_at: dict[int, float]
    ndcg_at: dict[int, float]
    vr_at: dict[int, float]
    dhr_at: dict[int, float]
    num_users: int
    num_dropped: int = 0
    num_generation_failures: int = 0
    num_short_beams: int = 0
    pooled: bool = False
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        def keyed(values: dict[int, float]) -> dict[str, float]:
            return {str(k): values[k] for k in sorted(values)}

        return {
            "recall_at": keyed(self.recall_at),
            "ndcg_at": keyed(self.ndcg_at),
            "vr_at": keyed(self.vr_at),
            "dhr_at": keyed(self.dhr_at),
            "num_users": self.num_users,
            "num_dropped": self.num_dropped,
            "num_generation_failures": self.num_generation_failures,
            "num_short_beams": self.num_short_beams,
            "pooled": self.pooled,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MetricsReport":
        def keyed(values: dict[str, float]) -> dict[int, float]:
            return {int(k): float(v) for k, v in values.items()}

        return cls(
            recall_at=keyed(data["recall_at"]),
            ndcg_at=keyed(data["ndcg_at"]),
            vr_at=keyed(data["vr_at"]),
            dhr_at=keyed(data["dhr_at"]),
            num_users=data["num_users"],
            num_dropped=data["num_dropped"],
            num_generation_failures=data.get("num_generation_failures", 0),
            num_short_beams=data.get("num_short_beams", 0),
            pooled=data.get("pooled", False),
        )


def compute_report(
    predictions: Sequence[RankedPrediction],
    ks: Sequence[int],
    num_dropped: int = 0,
    pooled: bool = False,
) -> MetricsReport:
    """Aggregate all four metric families at every K."""
    if not ks:
        raise PreconditionError("At least one K is required")
    for k in ks:
        _check_k(k)
    beam = max(ks)

    def mean(values: list[float]) -> float:
        return float(np.mean(values)) if values else 0.0

    def average(metric: Callable[[Sequence[str], str, int], float], k: int) -> float:
        return mean(
            [metric(p.grounded_items, p.target_item_id, k) for p in predictions]
        )

    return MetricsReport(
        recall_at={k: average(recall_at_k, k) for k in ks},
        ndcg_at={k: average(ndcg_at_k, k) for k in ks},
        vr_at={k: valid_rate_at_k(predictions, k, pooled) for k in ks},
        dhr_at={k: direct_hit_rate_at_k(predictions, k, pooled) for k in ks},
        num_users=len(predictions),
        num_dropped=num_dropped,
        num_generation_failures=sum(p.generation_failed for p in predictions),
        num_short_beams=sum(
            len(p.raw_candidates) < beam
            for p in predictions
            if not p.generation_failed
        ),
        pooled=pooled,
    )
