"""Workdir layout: where every stage reads and writes its artifacts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from tidkit.errors import MissingStageOutputError


@dataclass(frozen=True)
class Workdir:
    root: Path

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", Path(self.root))

    def ensure(self) -> "Workdir":
        self.root.mkdir(parents=True, exist_ok=True)
        self.corpus_dir.mkdir(parents=True, exist_ok=True)
        return self

    @property
    def corpus_dir(self) -> Path:
        return self.root / "corpus"

    @property
    def items(self) -> Path:
        return self.corpus_dir / "items.jsonl"

    @property
    def sequences(self) -> Path:
        return self.corpus_dir / "sequences.jsonl"

    @property
    def stats(self) -> Path:
        return self.corpus_dir / "stats.json"

    @property
    def embeddings(self) -> Path:
        return self.root / "embeddings.npz"

    @property
    def tids(self) -> Path:
        return self.root / "tids.jsonl"

    @property
    def ctg_checkpoint(self) -> Path:
        return self.root / "ctg.ckpt.jsonl"

    @property
    def ctg_failures(self) -> Path:
        return self.root / "ctg.failures.jsonl"

    @property
    def core_terms(self) -> Path:
        return self.root / "core_terms.jsonl"

    @property
    def tids_compressed(self) -> Path:
        return self.root / "tids.compressed.jsonl"

    @property
    def compression_meta(self) -> Path:
        return self.root / "compression.meta.json"

    @property
    def iift_train(self) -> Path:
        return self.root / "iift_train.jsonl"

    @property
    def eval_valid(self) -> Path:
        return self.root / "eval_valid.jsonl"

    @property
    def eval_test(self) -> Path:
        return self.root / "eval_test.jsonl"

    @property
    def train_config(self) -> Path:
        return self.root / "train_config.json"

    @property
    def library_bin(self) -> Path:
        return self.root / "library.bin"

    @property
    def library_jsonl(self) -> Path:
        return self.root / "library.jsonl"

    @property
    def collisions(self) -> Path:
        return self.root / "collisions.jsonl"

    @property
    def report(self) -> Path:
        return self.root / "report.json"

    @property
    def details(self) -> Path:
        return self.root / "details.tsv"

    @property
    def summary(self) -> Path:
        return self.root / "summary.md"

    @property
    def resolved_config(self) -> Path:
        return self.root / "config.resolved.json"

    def active_tids(self) -> Path:
        """Compressed TIDs when present, raw TIDs otherwise."""
        return self.tids_compressed if self.tids_compressed.exists() else self.tids

    def require(self, path: Path, command: str) -> Path:
        """Return ``path`` or raise naming the command that produces it."""
        if not path.exists():
            raise MissingStageOutputError(str(path), command)
        return path
