"""Cross-domain and multi-dataset corpus merging."""

from __future__ import annotations

import logging
from typing import Sequence

from tidkit.corpus.models import Corpus, InteractionSequence, ItemRecord
from tidkit.errors import EmptyCorpusError, PreconditionError

logger = logging.getLogger(__name__)


def _corpus_tag(corpus: Corpus) -> str:
    if len(corpus.domain_tags) != 1 or not corpus.domain_tags[0]:
        raise PreconditionError("Each corpus to merge needs exactly one domain tag")
    return corpus.domain_tags[0]


def _reconcile_items(
    corpora: Sequence[Corpus], tags: Sequence[str]
) -> tuple[dict[str, ItemRecord], list[dict[str, str]]]:
    """Union item tables; ids already claimed by an earlier domain get a tag prefix."""
    items: dict[str, ItemRecord] = {}
    renames: list[dict[str, str]] = []
    for corpus, tag in zip(corpora, tags):
        mapping: dict[str, str] = {}
        for item_id, item in corpus.items.items():
            new_id = item_id
            if item_id in items:
                new_id = f"{tag}:{item_id}"
                logger.warning(
                    "Item id %s appears in several domains; renamed to %s",
                    item_id,
                    new_id,
                )
            mapping[item_id] = new_id
            items[new_id] = ItemRecord(
                item_id=new_id,
                title=item.title,
                metadata_text=item.metadata_text,
                domain_tag=tag,
            )
        renames.append(mapping)
    return dict(sorted(items.items())), renames


def _domain_marks(domains: Sequence[str]) -> dict[str, tuple[int | None, int]]:
    positions: dict[str, list[int]] = {}
    for index, domain in enumerate(domains):
        positions.setdefault(domain, []).append(index)
    return {
        domain: (idx[-2] if len(idx) > 1 else None, idx[-1])
        for domain, idx in positions.items()
    }


def _interleave(
    user_id: str,
    parts: Sequence[tuple[InteractionSequence, str, dict[str, str]]],
) -> InteractionSequence:
    entries = []
    for rank, (seq, tag, mapping) in enumerate(parts):
        for pos, (item, ts) in enumerate(zip(seq.items, seq.timestamps)):
            entries.append((ts, rank, pos, mapping[item], tag))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    domains = tuple(e[4] for e in entries)
    return InteractionSequence(
        user_id=user_id,
        items=tuple(e[3] for e in entries),
        timestamps=tuple(e[0] for e in entries),
        domains=domains,
        domain_marks=_domain_marks(domains),
    )


def merge_cross_domain(corpus_a: Corpus, corpus_b: Corpus) -> Corpus:
    """Merge two tagged corpora over their overlapping users.

    Each merged sequence interleaves both domains by timestamp; equal
    timestamps place ``corpus_a`` first. Per-domain targets live in
    ``InteractionSequence.domain_marks``.
    """
    tag_a, tag_b = _corpus_tag(corpus_a), _corpus_tag(corpus_b)
    if tag_a == tag_b:
        raise PreconditionError("Cross-domain merge needs two distinct domain tags")

    by_user_a = {s.user_id: s for s in corpus_a.sequences}
    by_user_b = {s.user_id: s for s in corpus_b.sequences}
    shared = sorted(set(by_user_a) & set(by_user_b))
    if not shared:
        raise EmptyCorpusError(f"No overlapping users between {tag_a} and {tag_b}")

    all_items, renames = _reconcile_items([corpus_a, corpus_b], [tag_a, tag_b])
    sequences = [
        _interleave(
            user,
            [
                (by_user_a[user], tag_a, renames[0]),
                (by_user_b[user], tag_b, renames[1]),
            ],
        )
        for user in shared
    ]
    used = {item for seq in sequences for item in seq.items}
    logger.info("Merged %s + %s over %d shared users", tag_a, tag_b, len(shared))
    return Corpus(
        items={k: v for k, v in all_items.items() if k in used},
        sequences=sequences,
        domain_tags=(tag_a, tag_b),
        notes={
            "merge": "cross_domain",
            "shared_users": len(shared),
            "sources": [corpus_a.notes, corpus_b.notes],
        },
    )


def merge_corpora(corpora: Sequence[Corpus], shared_users: bool = False) -> Corpus:
    """Union several tagged corpora into one multi-dataset corpus.

    With ``shared_users`` False each user stays within its own domain and user
    ids are prefixed with the domain tag. With ``shared_users`` True a user's
    histories across all domains are interleaved chronologically, earlier
    corpora first on equal timestamps.
    """
    if not corpora:
        raise PreconditionError("merge_corpora needs at least one corpus")
    tags = [_corpus_tag(c) for c in corpora]
    if len(set(tags)) != len(tags):
        raise PreconditionError(f"Duplicate domain tags: {tags}")

    all_items, renames = _reconcile_items(corpora, tags)
    sequences: list[InteractionSequence] = []
    if shared_users:
        users: dict[str, list[tuple[InteractionSequence, str, dict[str, str]]]] = {}
        for corpus, tag, mapping in zip(corpora, tags, renames):
            for seq in corpus.sequences:
                users.setdefault(seq.user_id, []).append((seq, tag, mapping))
        sequences = [_interleave(user, users[user]) for user in sorted(users)]
    else:
        for corpus, tag, mapping in zip(corpora, tags, renames):
            for seq in corpus.sequences:
                domains = (tag,) * len(seq)
                sequences.append(
                    InteractionSequence(
                        user_id=f"{tag}:{seq.user_id}",
                        items=tuple(mapping[i] for i in seq.items),
                        timestamps=seq.timestamps,
                        domains=domains,
                        domain_marks=_domain_marks(domains),
                    )
                )
        sequences.sort(key=lambda s: s.user_id)
    if not sequences:
        raise EmptyCorpusError("Merged corpus has no sequences")
    return Corpus(
        items=all_items,
        sequences=sequences,
        domain_tags=tuple(tags),
        notes={"merge": "multi_dataset", "shared_users": shared_users},
    )


def domain_split(
    sequence: InteractionSequence, domain: str, mode: str = "test"
) -> tuple[tuple[str, ...], str] | None:
    """History and target for one domain of a merged sequence.

    ``mode`` is ``"test"`` (last item of the domain) or ``"valid"`` (the
    domain's previous item). History is every merged item strictly before the
    target. Returns None when the domain has no such target.
    """
    if mode not in ("test", "valid"):
        raise PreconditionError(f"Unknown split mode: {mode}")
    marks = sequence.domain_marks.get(domain)
    if marks is None:
        return None
    index = marks[1] if mode == "test" else marks[0]
    if index is None or index == 0:
        return None
    return sequence.items[:index], sequence.items[index]
