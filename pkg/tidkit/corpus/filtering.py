"""k-core filtering of the user-item interaction graph."""

from __future__ import annotations

import logging
from typing import Sequence

import pandas as pd

from tidkit.corpus.models import InteractionRecord
from tidkit.errors import EmptyCorpusError, PreconditionError

logger = logging.getLogger(__name__)


def _frame(interactions: Sequence[InteractionRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "user_id": [r.user_id for r in interactions],
            "item_id": [r.item_id for r in interactions],
        }
    )


def k_core_mask(df: pd.DataFrame, k: int) -> pd.Series:
    """Boolean mask over ``df`` rows that survive iterative peeling.

    Users and items with fewer than ``k`` interactions are removed until no
    row changes. Duplicate (user, item) rows count as separate interactions.
    """
    keep = pd.Series(True, index=df.index)
    while True:
        current = df[keep]
        user_deg = current["user_id"].map(current["user_id"].value_counts())
        item_deg = current["item_id"].map(current["item_id"].value_counts())
        drop = current.index[(user_deg < k) | (item_deg < k)]
        if len(drop) == 0:
            return keep
        keep.loc[drop] = False


def k_core_filter(
    interactions: Sequence[InteractionRecord], k: int
) -> list[InteractionRecord]:
    """Return the maximal sub-multiset where every user and item has degree >= k.

    Input order is preserved. Raises EmptyCorpusError when nothing survives.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if not interactions:
        raise EmptyCorpusError("No interactions to filter")
    df = _frame(interactions)
    keep = k_core_mask(df, k)
    survivors = [r for r, kept in zip(interactions, keep.tolist()) if kept]
    logger.info(
        "%d-core filter kept %d of %d interactions",
        k,
        len(survivors),
        len(interactions),
    )
    if not survivors:
        raise EmptyCorpusError(f"{k}-core filtering removed every interaction")
    return survivors
