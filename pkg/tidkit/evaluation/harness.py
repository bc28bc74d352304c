"""Run a generator over evaluation samples and score the grounded beams."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import pandas as pd

from tidkit.data.store import write_json
from tidkit.errors import FatalServiceError, PreconditionError, ServiceError
from tidkit.evaluation.metrics import MetricsReport, RankedPrediction, compute_report
from tidkit.grounding.ground import ground_beam
from tidkit.grounding.library import CandidateLibrary
from tidkit.iift.samples import EvalSample
from tidkit.schemas import validate_instance
from tidkit.services.base import GenerationClient
from tidkit.services.models import GenerationRequest

logger = logging.getLogger(__name__)

DEFAULT_MAX_NEW_TOKENS = 30
_ABORT_STATUS = {None, 401, 403}


@dataclass(frozen=True)
class EvaluationRun:
    report: MetricsReport
    predictions: list[RankedPrediction]


def request_for(
    sample: EvalSample,
    beam_width: int,
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS,
    temperature: float = 0.0,
) -> GenerationRequest:
    return GenerationRequest(
        system_text=sample.instruction,
        user_text=sample.input,
        max_new_tokens=max_new_tokens,
        num_return_sequences=beam_width,
        temperature=temperature,
    )


def predict(
    sample: EvalSample,
    client: GenerationClient,
    library: CandidateLibrary,
    beam_width: int,
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS,
    temperature: float = 0.0,
    brute_force: bool = False,
) -> RankedPrediction:
    """Generate, ground and package one sample's beam."""
    request = request_for(sample, beam_width, max_new_tokens, temperature)
    try:
        candidates = client.generate(request)[:beam_width]
    except FatalServiceError as exc:
        if exc.status_code in _ABORT_STATUS:
            raise
        logger.warning("Generation failed for user %s: %s", sample.user_id, exc)
        return _failed(sample)
    except ServiceError as exc:
        logger.warning("Generation failed for user %s: %s", sample.user_id, exc)
        return _failed(sample)
    beam = ground_beam(candidates, library, beam_width, brute_force=brute_force)
    return RankedPrediction(
        user_id=sample.user_id,
        target_item_id=sample.target_item_id,
        grounded_items=tuple(beam.items),
        raw_candidates=tuple(candidates),
        validity_flags=tuple(beam.validity_flags),
        tracks=tuple(beam.tracks),
        domain=sample.domain,
    )


def _failed(sample: EvalSample) -> RankedPrediction:
    return RankedPrediction(
        user_id=sample.user_id,
        target_item_id=sample.target_item_id,
        domain=sample.domain,
        generation_failed=True,
    )


def evaluate(
    samples: Sequence[EvalSample],
    client: GenerationClient,
    library: CandidateLibrary,
    ks: Sequence[int] = (5, 10),
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS,
    temperature: float = 0.0,
    pooled: bool = False,
    brute_force: bool = False,
    max_in_flight: int = 4,
    num_dropped: int = 0,
) -> EvaluationRun:
    """Score ``samples`` with a beam of ``max(ks)`` candidates each.

    Failed generations stay in the denominators as all-zero rows.
    """
    if not samples:
        raise PreconditionError("No evaluation samples")
    if not ks:
        raise PreconditionError("At least one K is required")
    beam_width = max(ks)

    def run(sample: EvalSample) -> RankedPrediction:
        return predict(
            sample,
            client,
            library,
            beam_width,
            max_new_tokens=max_new_tokens,
            temperature=temperature,
            brute_force=brute_force,
        )

    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        predictions = list(pool.map(run, samples))
    report = compute_report(predictions, ks, num_dropped=num_dropped, pooled=pooled)
    logger.info(
        "Evaluated %d samples: %s",
        report.num_users,
        ", ".join(f"recall@{k}={v:.4f}" for k, v in sorted(report.recall_at.items())),
    )
    if report.num_generation_failures:
        logger.warning("%d generation failures", report.num_generation_failures)
    return EvaluationRun(report=report, predictions=predictions)


def details_frame(predictions: Sequence[RankedPrediction]) -> pd.DataFrame:
    """One row per prediction; list columns are comma-joined."""
    return pd.DataFrame(
        [
            {
                "user_id": p.user_id,
                "domain": p.domain or "",
                "target": p.target_item_id,
                "rank": p.rank() or "",
                "ranked_items": ",".join(p.grounded_items),
                "validity": ",".join("1" if v else "0" for v in p.validity_flags),
                "tracks": ",".join(p.tracks),
                "generation_failed": int(p.generation_failed),
            }
            for p in predictions
        ],
        columns=[
            "user_id",
            "domain",
            "target",
            "rank",
            "ranked_items",
            "validity",
            "tracks",
            "generation_failed",
        ],
    )


def write_evaluation(
    run: EvaluationRun, report_path: Path | str, details_path: Path | str
) -> None:
    data = run.report.to_dict()
    validate_instance(data, "metrics_report")
    write_json(report_path, data)
    details_frame(run.predictions).to_csv(
        details_path, sep="\t", index=False, lineterminator="\n"
    )
