"""Markdown tables for the run summary."""

from __future__ import annotations

from tidkit.evaluation.metrics import MetricsReport
from tidkit.reports.core import RunSummaryData


def generate_corpus_table(data: RunSummaryData) -> str:
    if not data.corpus_stats:
        return "(No corpus statistics available)"
    stats = data.corpus_stats
    users = stats["user_count"]
    items = stats["item_count"]
    interactions = stats["interaction_count"]
    density = interactions / (users * items) if users and items else 0.0
    return f"""
| Users | Items | Interactions | Density |
|-------|-------|--------------|---------|
| {users} | {items} | {interactions} | {density:.4%} |
""".strip()


def generate_metrics_table(report: MetricsReport | None) -> str:
    if report is None:
        return "(No evaluation report available)"
    lines = ["| K | Recall | NDCG | VR | DHR |", "|---|--------|------|----|-----|"]
    for k in sorted(report.recall_at):
        lines.append(
            f"| {k} | {report.recall_at[k]:.4f} | {report.ndcg_at[k]:.4f} "
            f"| {report.vr_at[k]:.4f} | {report.dhr_at[k]:.4f} |"
        )
    return "\n".join(lines)
