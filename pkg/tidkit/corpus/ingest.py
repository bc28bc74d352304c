"""Raw review/metadata ingestion.

Accepts line-delimited records either in the toolkit's own field names
(``item_id``, ``user_id``, ``timestamp``) or in the public Amazon dump names
(``asin``, ``reviewerID``, ``unixReviewTime``). Files may be gzip-compressed;
the older metadata dumps hold Python-literal lines rather than strict JSON.
"""

from __future__ import annotations

import ast
import gzip
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator

from tidkit.corpus.models import InteractionRecord, ItemRecord
from tidkit.errors import IngestionError

logger = logging.getLogger(__name__)

ITEM_ID_KEYS = ("item_id", "asin", "parent_asin")
USER_ID_KEYS = ("user_id", "reviewerID")
TIMESTAMP_KEYS = ("timestamp", "unixReviewTime")
CATEGORY_SEPARATOR = " > "


@dataclass
class IngestResult:
    items: list[ItemRecord]
    interactions: list[InteractionRecord]
    malformed_metadata_lines: int = 0
    malformed_review_lines: int = 0
    items_without_metadata: int = 0
    duplicate_items: int = 0
    unresolved_interactions: int = 0
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def warning_count(self) -> int:
        return (
            self.malformed_metadata_lines
            + self.malformed_review_lines
            + self.unresolved_interactions
        )

    def counters(self) -> dict[str, int]:
        return {
            "malformed_metadata_lines": self.malformed_metadata_lines,
            "malformed_review_lines": self.malformed_review_lines,
            "items_without_metadata": self.items_without_metadata,
            "duplicate_items": self.duplicate_items,
            "unresolved_interactions": self.unresolved_interactions,
        }


def _open_binary(path: Path) -> io.BufferedIOBase:
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _iter_lines(path: Path) -> Iterator[bytes]:
    """Non-blank raw lines; decoding is per line so one bad line stays local."""
    try:
        with _open_binary(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    yield line
    except (OSError, EOFError) as exc:
        raise IngestionError(f"Cannot read {path}: {exc}") from exc


def _parse_line(raw: bytes) -> dict[str, Any] | None:
    try:
        line = raw.decode("utf-8")
    except UnicodeDecodeError:
        return None
    try:
        value = json.loads(line)
    except RecursionError:
        return None
    except json.JSONDecodeError:
        try:
            value = ast.literal_eval(line)
        except (ValueError, TypeError, SyntaxError, MemoryError, RecursionError):
            return None
    return value if isinstance(value, dict) else None


def _first(record: dict[str, Any], keys: tuple[str, ...]) -> Any:
    for key in keys:
        value = record.get(key)
        if value not in (None, ""):
            return value
    return None


def _as_text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return " ".join(str(v).strip() for v in value if str(v).strip())
    return str(value).strip()


def _categories_text(categories: Any) -> str:
    if not categories:
        return ""
    if not isinstance(categories, list):
        categories = [categories]
    elif all(isinstance(c, str) for c in categories):
        categories = [categories]
    paths = []
    for path in categories:
        if isinstance(path, list):
            names = (str(c).strip() for c in path)
            joined = CATEGORY_SEPARATOR.join(c for c in names if c)
        else:
            joined = str(path).strip()
        if joined:
            paths.append(joined)
    return "\n".join(paths)


def build_metadata_text(
    title: str, brand: str, categories: Any, description: str
) -> str:
    """Assemble m_i: title, brand, categories, description, newline-separated."""
    parts = [title, brand, _categories_text(categories), description]
    return "\n".join(p for p in parts if p)


class _EmptyMetadata(Exception):
    pass


def _map_metadata(record: dict[str, Any], domain_tag: str | None) -> ItemRecord | None:
    item_id = _first(record, ITEM_ID_KEYS)
    if item_id is None:
        return None
    title = _as_text(record.get("title"))
    metadata_text = build_metadata_text(
        title,
        _as_text(record.get("brand")),
        record.get("categories") or record.get("category"),
        _as_text(record.get("description")),
    )
    if not metadata_text:
        raise _EmptyMetadata(str(item_id))
    return ItemRecord(
        item_id=str(item_id),
        title=title,
        metadata_text=metadata_text,
        domain_tag=domain_tag,
    )


def _map_review(
    record: dict[str, Any], domain_tag: str | None
) -> InteractionRecord | None:
    user_id = _first(record, USER_ID_KEYS)
    item_id = _first(record, ITEM_ID_KEYS)
    timestamp = _first(record, TIMESTAMP_KEYS)
    if user_id is None or item_id is None or timestamp is None:
        return None
    try:
        ts = int(timestamp)
    except (TypeError, ValueError):
        return None
    return InteractionRecord(
        user_id=str(user_id), item_id=str(item_id), timestamp=ts, domain_tag=domain_tag
    )


def ingest(
    metadata_path: Path | str,
    reviews_path: Path | str,
    domain_tag: str | None = None,
) -> IngestResult:
    """Read metadata and review files into item and interaction records.

    Malformed lines are skipped and counted; interactions pointing at items
    without usable metadata are dropped and counted. An unreadable file
    raises IngestionError.
    """
    metadata_path, reviews_path = Path(metadata_path), Path(reviews_path)
    for path in (metadata_path, reviews_path):
        if not path.is_file():
            raise IngestionError(f"Input file not found: {path}")

    result = IngestResult(items=[], interactions=[])
    seen: set[str] = set()
    for line in _iter_lines(metadata_path):
        record = _parse_line(line)
        if record is None:
            result.malformed_metadata_lines += 1
            continue
        try:
            item = _map_metadata(record, domain_tag)
        except _EmptyMetadata:
            result.items_without_metadata += 1
            continue
        if item is None:
            result.malformed_metadata_lines += 1
            continue
        if item.item_id in seen:
            result.duplicate_items += 1
            continue
        seen.add(item.item_id)
        result.items.append(item)

    for line in _iter_lines(reviews_path):
        record = _parse_line(line)
        interaction = _map_review(record, domain_tag) if record is not None else None
        if interaction is None:
            result.malformed_review_lines += 1
            continue
        if interaction.item_id not in seen:
            result.unresolved_interactions += 1
            continue
        result.interactions.append(interaction)

    if result.items_without_metadata:
        logger.warning(
            "Dropped %d items with empty metadata from %s",
            result.items_without_metadata,
            metadata_path,
        )
    if result.warning_count:
        logger.warning(
            "Ingestion warnings for %s: %s",
            domain_tag or reviews_path.name,
            result.counters(),
        )
    logger.info(
        "Ingested %d items and %d interactions (%s)",
        len(result.items),
        len(result.interactions),
        domain_tag or "untagged",
    )
    return result
