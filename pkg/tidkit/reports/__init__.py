"""Reports subsystem.

Gathers workdir artifacts and renders the Markdown run summary.
"""

from tidkit.reports.core import RunSummaryData, gather_run_summary
from tidkit.reports.summary import generate_run_summary
from tidkit.reports.tables import generate_corpus_table, generate_metrics_table

__all__ = [
    "RunSummaryData",
    "gather_run_summary",
    "generate_corpus_table",
    "generate_metrics_table",
    "generate_run_summary",
]
