"""library.bin codec and library.jsonl dump.

Layout, all integers little-endian::

    magic        4 bytes   b"TIDL"
    version      u32       1
    count        u32       number of records
    record * count:
        item_id      u32 length + UTF-8 bytes
        popularity   u64
        term_count   u16
        term * term_count: u16 length + UTF-8 bytes

Records are written in item_id order.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO

from tidkit.ctg.terms import TermIdSequence
from tidkit.data.store import write_jsonl
from tidkit.errors import PreconditionError
from tidkit.grounding.library import CandidateLibrary, build_library

MAGIC = b"TIDL"
VERSION = 1

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")


def _write_bytes(f: BinaryIO, data: bytes, length: struct.Struct) -> None:
    f.write(length.pack(len(data)))
    f.write(data)


def _read_exact(f: BinaryIO, size: int) -> bytes:
    data = f.read(size)
    if len(data) != size:
        raise PreconditionError("Truncated library file")
    return data


def _read_int(f: BinaryIO, fmt: struct.Struct) -> int:
    return fmt.unpack(_read_exact(f, fmt.size))[0]


def _read_text(f: BinaryIO, length: struct.Struct) -> str:
    return _read_exact(f, _read_int(f, length)).decode("utf-8")


def write_library(path: Path | str, library: CandidateLibrary) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(_U32.pack(VERSION))
        f.write(_U32.pack(len(library)))
        for item_id in sorted(library.item_tids):
            tid = library.item_tids[item_id]
            _write_bytes(f, item_id.encode("utf-8"), _U32)
            f.write(_U64.pack(library.pop(item_id)))
            f.write(_U16.pack(len(tid)))
            for term in tid.terms:
                _write_bytes(f, term.encode("ascii"), _U16)


def read_library(path: Path | str) -> CandidateLibrary:
    """Decode library.bin and rebuild both indexes."""
    tids: dict[str, TermIdSequence] = {}
    popularity: dict[str, int] = {}
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise PreconditionError(f"{path} is not a TID library (magic {magic!r})")
        version = _read_int(f, _U32)
        if version != VERSION:
            raise PreconditionError(f"Unsupported library version {version}")
        for _ in range(_read_int(f, _U32)):
            item_id = _read_text(f, _U32)
            popularity[item_id] = _read_int(f, _U64)
            count = _read_int(f, _U16)
            tids[item_id] = TermIdSequence(
                tuple(_read_text(f, _U16) for _ in range(count))
            )
    return build_library(tids, popularity)


def dump_library_jsonl(path: Path | str, library: CandidateLibrary) -> int:
    return write_jsonl(
        path,
        (
            {
                "item_id": item_id,
                "terms": list(tid.terms),
                "popularity": library.pop(item_id),
            }
            for item_id, tid in sorted(library.item_tids.items())
        ),
    )


def write_collisions(path: Path | str, library: CandidateLibrary) -> int:
    return write_jsonl(path, (c.to_dict() for c in library.collisions()))
