"""Recall, NDCG, valid-rate and direct-hit-rate evaluation."""

from tidkit.evaluation.harness import (
    EvaluationRun,
    details_frame,
    evaluate,
    predict,
    write_evaluation,
)
from tidkit.evaluation.metrics import (
    MetricsReport,
    RankedPrediction,
    compute_report,
    direct_hit_rate_at_k,
    ndcg_at_k,
    recall_at_k,
    valid_rate_at_k,
)

__all__ = [
    "EvaluationRun",
    "MetricsReport",
    "RankedPrediction",
    "compute_report",
    "details_frame",
    "direct_hit_rate_at_k",
    "evaluate",
    "ndcg_at_k",
    "predict",
    "recall_at_k",
    "valid_rate_at_k",
    "write_evaluation",
]
