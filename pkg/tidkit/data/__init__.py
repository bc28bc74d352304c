"""File-backed storage: JSONL helpers and the workdir layout."""

from tidkit.data.store import read_json, read_jsonl, write_json, write_jsonl
from tidkit.data.workdir import Workdir

__all__ = ["Workdir", "read_json", "read_jsonl", "write_json", "write_jsonl"]
