"""Corpus directory serialization (items.jsonl, sequences.jsonl, stats.json)."""

from __future__ import annotations

from pathlib import Path

from tidkit.corpus.models import Corpus, InteractionSequence, ItemRecord
from tidkit.data.store import read_json, read_jsonl, write_json, write_jsonl
from tidkit.schemas import validate_instance

ITEMS_FILE = "items.jsonl"
SEQUENCES_FILE = "sequences.jsonl"
STATS_FILE = "stats.json"


def save_corpus(corpus: Corpus, directory: Path | str) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_jsonl(
        directory / ITEMS_FILE, (item.to_dict() for item in corpus.items.values())
    )
    write_jsonl(directory / SEQUENCES_FILE, (seq.to_dict() for seq in corpus.sequences))
    stats = corpus.stats.to_dict()
    stats["domain_tags"] = list(corpus.domain_tags)
    stats["notes"] = corpus.notes
    write_json(directory / STATS_FILE, stats)
    return directory


def load_corpus(directory: Path | str) -> Corpus:
    directory = Path(directory)
    items = {}
    for record in read_jsonl(directory / ITEMS_FILE):
        validate_instance(record, "item_record")
        item = ItemRecord.from_dict(record)
        items[item.item_id] = item
    sequences = [
        InteractionSequence.from_dict(r)
        for r in read_jsonl(directory / SEQUENCES_FILE)
    ]
    stats = read_json(directory / STATS_FILE)
    return Corpus(
        items=items,
        sequences=sequences,
        domain_tags=tuple(stats.get("domain_tags", ())),
        notes=stats.get("notes", {}),
    )
