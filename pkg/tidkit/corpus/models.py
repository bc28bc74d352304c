"""Corpus record types."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from tidkit.errors import PreconditionError


@dataclass(frozen=True)
class ItemRecord:
    """A catalog item. ``metadata_text`` is the text every model sees."""

    item_id: str
    title: str
    metadata_text: str
    domain_tag: str | None = None

    def __post_init__(self) -> None:
        if not self.item_id:
            raise PreconditionError("item_id must be nonempty")
        if not self.metadata_text.strip():
            raise PreconditionError(f"Item {self.item_id} has empty metadata_text")

    def to_dict(self) -> dict[str, Any]:
        return {
            "item_id": self.item_id,
            "title": self.title,
            "metadata_text": self.metadata_text,
            "domain_tag": self.domain_tag,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ItemRecord":
        return cls(
            item_id=data["item_id"],
            title=data.get("title", ""),
            metadata_text=data["metadata_text"],
            domain_tag=data.get("domain_tag"),
        )


@dataclass(frozen=True)
class InteractionRecord:
    user_id: str
    item_id: str
    timestamp: int
    domain_tag: str | None = None


@dataclass(frozen=True)
class InteractionSequence:
    """One user's chronologically ordered history.

    ``split_marks`` holds the (validation, test) positions of the whole
    sequence. For merged cross-domain sequences ``domain_marks`` holds the
    same pair per domain; the validation position is ``None`` when a domain
    contributes a single item.
    """

    user_id: str
    items: tuple[str, ...]
    timestamps: tuple[int, ...]
    domains: tuple[str | None, ...] = ()
    domain_marks: dict[str, tuple[int | None, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.items) != len(self.timestamps):
            raise PreconditionError("items and timestamps must align")
        if self.domains and len(self.domains) != len(self.items):
            raise PreconditionError("domains and items must align")
        if any(a > b for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise PreconditionError(f"Timestamps out of order for user {self.user_id}")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def split_marks(self) -> tuple[int, int]:
        n = len(self.items)
        return (n - 2, n - 1)

    def to_dict(self) -> dict[str, Any]:
        valid, test = self.split_marks
        record: dict[str, Any] = {
            "user_id": self.user_id,
            "items": list(self.items),
            "timestamps": list(self.timestamps),
            "split_marks": {"valid": valid, "test": test},
        }
        if self.domains:
            record["domains"] = list(self.domains)
        if self.domain_marks:
            record["domain_marks"] = {
                domain: {"valid": v, "test": t}
                for domain, (v, t) in sorted(self.domain_marks.items())
            }
        return record

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "InteractionSequence":
        marks = {
            domain: (m["valid"], m["test"])
            for domain, m in data.get("domain_marks", {}).items()
        }
        return cls(
            user_id=data["user_id"],
            items=tuple(data["items"]),
            timestamps=tuple(int(t) for t in data["timestamps"]),
            domains=tuple(data.get("domains", ())),
            domain_marks=marks,
        )


@dataclass(frozen=True)
class CorpusStats:
    user_count: int
    item_count: int
    interaction_count: int

    def to_dict(self) -> dict[str, int]:
        return {
            "user_count": self.user_count,
            "item_count": self.item_count,
            "interaction_count": self.interaction_count,
        }


@dataclass
class Corpus:
    """Filtered items plus per-user sequences. Treated as immutable once built."""

    items: dict[str, ItemRecord]
    sequences: list[InteractionSequence]
    domain_tags: tuple[str, ...] = ()
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def stats(self) -> CorpusStats:
        return CorpusStats(
            user_count=len(self.sequences),
            item_count=len(self.items),
            interaction_count=sum(len(s) for s in self.sequences),
        )

    def popularity(self) -> Counter[str]:
        """Interaction count per item over all stored sequences."""
        counts: Counter[str] = Counter()
        for seq in self.sequences:
            counts.update(seq.items)
        return counts

    def sequence_for(self, user_id: str) -> InteractionSequence | None:
        for seq in self.sequences:
            if seq.user_id == user_id:
                return seq
        return None
