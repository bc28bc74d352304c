"""Canonical term form, Term-ID sequences and response parsing.

A term is one or more ASCII alphanumeric words joined by hyphens, each word
capitalized: ``Cell-Phone``, ``6-Inch``, ``Dual-Sim``.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from tidkit.data.store import iter_jsonl, write_jsonl
from tidkit.errors import PreconditionError, TidParseError
from tidkit.schemas import validate_instance

MAX_TERM_LENGTH = 40
TERM_SEPARATOR = ", "
TERM_PATTERN = re.compile(r"^[A-Z0-9][A-Za-z0-9]*(-[A-Z0-9][A-Za-z0-9]*)*$")

_WORD_BREAK = re.compile(r"[\s_/]+")
_NON_TERM = re.compile(r"[^A-Za-z0-9-]")
_HYPHENS = re.compile(r"-{2,}")
_LABEL = re.compile(r"^\s*(?:[-*•]\s|\d+[.)]\s)?\s*(?:[A-Za-z ]{0,20}:)?\s*")


def _segment(word: str) -> str:
    return word[:1].upper() + word[1:].lower()


def normalize_term(raw: str) -> str:
    """Map free text onto the canonical term form; may return ``""``."""
    text = unicodedata.normalize("NFKD", raw).encode("ascii", "ignore").decode("ascii")
    text = _WORD_BREAK.sub("-", text.strip())
    text = _NON_TERM.sub("", text)
    text = _HYPHENS.sub("-", text).strip("-")
    return "-".join(_segment(w) for w in text.split("-"))


def is_canonical(term: str) -> bool:
    return 0 < len(term) <= MAX_TERM_LENGTH and TERM_PATTERN.match(term) is not None


@dataclass(frozen=True)
class TermIdSequence:
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise PreconditionError("A Term-ID sequence needs at least one term")
        for term in self.terms:
            if not is_canonical(term):
                raise PreconditionError(f"Not a canonical term: {term!r}")
        if len(set(self.terms)) != len(self.terms):
            raise PreconditionError(f"Duplicate terms in {self.terms}")

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def canonical(self) -> str:
        return TERM_SEPARATOR.join(self.terms)

    @classmethod
    def of(cls, terms: Iterable[str]) -> "TermIdSequence":
        return cls(tuple(terms))

    @classmethod
    def from_canonical(cls, text: str) -> "TermIdSequence":
        return cls(tuple(t.strip() for t in text.split(",")))


def _schema_line(raw: str, n: int) -> str:
    lines = [ln.strip() for ln in raw.strip().splitlines()]
    lines = [ln for ln in lines if re.search(r"[A-Za-z0-9]", ln)]
    if not lines:
        raise TidParseError("empty response", raw)
    if n > 1:
        with_commas = [ln for ln in lines if "," in ln]
        if with_commas:
            return with_commas[-1]
    return lines[-1]


def _clean_line(line: str) -> str:
    line = _LABEL.sub("", line, count=1)
    return line.strip().strip("[](){}\"'`").strip()


def _dedupe(terms: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    unique = []
    for term in terms:
        if term not in seen:
            seen.add(term)
            unique.append(term)
    return unique


def parse_tid_response(raw: str, n: int) -> TermIdSequence:
    """Strictly parse a generated response into exactly ``n`` unique terms.

    Raises TidParseError on an empty or unparseable response, an empty or
    over-long token, or a unique-term count other than ``n``.
    """
    line = _clean_line(_schema_line(raw, n))
    tokens = [t.strip() for t in line.split(",")]
    terms = []
    for token in tokens:
        term = normalize_term(token)
        if not term:
            raise TidParseError("empty token", raw)
        if len(term) > MAX_TERM_LENGTH:
            raise TidParseError(f"term longer than {MAX_TERM_LENGTH} characters", raw)
        terms.append(term)
    unique = _dedupe(terms)
    if len(unique) != n:
        raise TidParseError(f"expected {n} unique terms, got {len(unique)}", raw)
    return TermIdSequence(tuple(unique))


def parse_tid_lenient(raw: str, n: int) -> TermIdSequence | None:
    """Parse a beam candidate, accepting 1..n unique terms; None otherwise."""
    try:
        line = _clean_line(_schema_line(raw, n))
    except TidParseError:
        return None
    terms = [normalize_term(t) for t in line.split(",")]
    unique = _dedupe(t for t in terms if t and len(t) <= MAX_TERM_LENGTH)
    if not 1 <= len(unique) <= n:
        return None
    return TermIdSequence(tuple(unique))


def write_tid_file(path: Path | str, tids: Mapping[str, TermIdSequence]) -> int:
    """Write ``tids.jsonl`` rows sorted by item_id."""
    rows = []
    for item_id in sorted(tids):
        row = {"item_id": item_id, "terms": list(tids[item_id].terms)}
        validate_instance(row, "tid_record")
        rows.append(row)
    return write_jsonl(path, rows)


def read_tid_file(path: Path | str) -> dict[str, TermIdSequence]:
    tids = {}
    for row in iter_jsonl(path):
        validate_instance(row, "tid_record")
        tids[row["item_id"]] = TermIdSequence.of(row["terms"])
    return tids
