"""Markdown run summary."""

from __future__ import annotations

from tidkit.reports.core import RunSummaryData
from tidkit.reports.tables import generate_corpus_table, generate_metrics_table
from tidkit.security.redaction import Redactor


def generate_run_summary(data: RunSummaryData) -> str:
    """Render corpus, identifier and metric sections as Markdown."""
    sections = [f"# Run Summary: {data.workdir}", "---"]

    sections.append("## Corpus")
    sections.append(generate_corpus_table(data))
    notes = (data.corpus_stats or {}).get("notes") or {}
    if notes:
        sections.append("")
        sections.extend(f"- **{key}**: {notes[key]}" for key in sorted(notes))
    sections.append("")

    sections.append("## Term IDs")
    if data.tid_count is None:
        sections.append("(No Term IDs generated)")
    else:
        sections.append(f"- **Items with TIDs**: {data.tid_count}")
        sections.append(f"- **Unique terms**: {data.vocabulary_size}")
        if data.ctg_failures is not None:
            sections.append(f"- **Generation failures**: {data.ctg_failures}")
        if data.collisions is not None:
            sections.append(
                f"- **TID collisions**: {data.collisions} "
                f"({data.colliding_items} items)"
            )
    if data.compression:
        comp = data.compression
        sections.append(
            f"- **Compression**: {comp['vocabulary_size']} terms -> {comp['k']} core "
            f"terms (seed {comp['seed']}, {comp['iterations']} iterations)"
        )
    sections.append("")

    sections.append("## Metrics")
    sections.append(generate_metrics_table(data.metrics))
    if data.metrics is not None:
        m = data.metrics
        mode = "pooled" if m.pooled else "per-user"
        sections.append("")
        sections.append(
            f"{m.num_users} samples evaluated, {m.num_dropped} dropped, "
            f"{m.num_generation_failures} generation failures; VR/DHR {mode}."
        )

    return Redactor().redact_text("\n".join(sections) + "\n")
