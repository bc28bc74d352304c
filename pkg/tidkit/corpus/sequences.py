"""Per-user chronological sequences and leave-one-out splits."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import pandas as pd

from tidkit.corpus.models import InteractionRecord, InteractionSequence
from tidkit.errors import PreconditionError

logger = logging.getLogger(__name__)

MIN_SEQUENCE_LENGTH = 3


@dataclass(frozen=True)
class SequenceBuildResult:
    sequences: list[InteractionSequence]
    dropped_short: int


@dataclass(frozen=True)
class LeaveOneOutSplit:
    train: tuple[str, ...]
    valid: str
    test: str


def build_sequences(
    interactions: Sequence[InteractionRecord],
    min_length: int = MIN_SEQUENCE_LENGTH,
) -> SequenceBuildResult:
    """Group interactions per user, sorted by timestamp (stable on input order).

    Users are emitted in sorted user_id order; sequences shorter than
    ``min_length`` are dropped and counted.
    """
    if not interactions:
        return SequenceBuildResult(sequences=[], dropped_short=0)
    df = pd.DataFrame(
        {
            "user_id": [r.user_id for r in interactions],
            "item_id": [r.item_id for r in interactions],
            "timestamp": [r.timestamp for r in interactions],
            "domain": [r.domain_tag for r in interactions],
            "order": range(len(interactions)),
        }
    )
    df = df.sort_values(["user_id", "timestamp", "order"], kind="stable")

    sequences: list[InteractionSequence] = []
    dropped = 0
    for user_id, group in df.groupby("user_id", sort=True):
        if len(group) < min_length:
            dropped += 1
            continue
        domains = tuple(group["domain"].tolist())
        sequences.append(
            InteractionSequence(
                user_id=str(user_id),
                items=tuple(group["item_id"].tolist()),
                timestamps=tuple(int(t) for t in group["timestamp"].tolist()),
                domains=domains if any(d is not None for d in domains) else (),
            )
        )
    if dropped:
        logger.info(
            "Dropped %d users with fewer than %d interactions", dropped, min_length
        )
    return SequenceBuildResult(sequences=sequences, dropped_short=dropped)


def leave_one_out_split(
    sequence: InteractionSequence | Sequence[str],
) -> LeaveOneOutSplit:
    """Last item is the test target, second-to-last the validation target."""
    if isinstance(sequence, InteractionSequence):
        sequence = sequence.items
    items = tuple(sequence)
    if len(items) < MIN_SEQUENCE_LENGTH:
        raise PreconditionError(
            f"Leave-one-out needs at least {MIN_SEQUENCE_LENGTH} items, "
            f"got {len(items)}"
        )
    return LeaveOneOutSplit(train=items[:-2], valid=items[-2], test=items[-1])


def truncate_history(items: Sequence[str], max_length: int) -> tuple[str, ...]:
    """Keep the most recent ``max_length`` items."""
    if max_length < 1:
        raise PreconditionError("max_length must be >= 1")
    return tuple(items[-max_length:])
