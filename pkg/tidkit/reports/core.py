"""Collect run artifacts from a workdir for the summary report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from tidkit.data.store import iter_jsonl, read_json
from tidkit.data.workdir import Workdir
from tidkit.evaluation.metrics import MetricsReport


@dataclass
class RunSummaryData:
    """Whatever stages have produced so far; missing parts stay None."""

    workdir: str
    corpus_stats: dict[str, Any] | None = None
    tid_count: int | None = None
    vocabulary_size: int | None = None
    ctg_failures: int | None = None
    compression: dict[str, Any] | None = None
    collisions: int | None = None
    colliding_items: int | None = None
    metrics: MetricsReport | None = None


def _count_lines(path) -> int:
    return sum(1 for _ in iter_jsonl(path))


def gather_run_summary(workdir: Workdir) -> RunSummaryData:
    data = RunSummaryData(workdir=str(workdir.root))
    if workdir.stats.exists():
        data.corpus_stats = read_json(workdir.stats)
    tids_path = workdir.active_tids()
    if tids_path.exists():
        terms: set[str] = set()
        count = 0
        for row in iter_jsonl(tids_path):
            terms.update(row["terms"])
            count += 1
        data.tid_count = count
        data.vocabulary_size = len(terms)
    if workdir.ctg_failures.exists():
        data.ctg_failures = _count_lines(workdir.ctg_failures)
    if workdir.compression_meta.exists():
        data.compression = read_json(workdir.compression_meta)
    if workdir.collisions.exists():
        rows = list(iter_jsonl(workdir.collisions))
        data.collisions = len(rows)
        data.colliding_items = sum(len(r["item_ids"]) for r in rows)
    if workdir.report.exists():
        data.metrics = MetricsReport.from_dict(read_json(workdir.report))
    return data
