"""JSONL export of instruction-tuning and evaluation samples."""

from __future__ import annotations

import logging
import random
from pathlib import Path
from typing import Any, Iterable, Sequence

from tidkit.data.store import iter_jsonl, write_json, write_jsonl
from tidkit.errors import PreconditionError
from tidkit.iift.samples import EvalSample, GtiSample, SeqSample
from tidkit.prompts import PromptTemplates, load_default_templates
from tidkit.schemas import validate_instance

logger = logging.getLogger(__name__)

Sample = GtiSample | SeqSample | EvalSample

TRAINING_DEFAULTS: dict[str, Any] = {
    "objective": "next_token_prediction",
    "fine_tuning": "full_parameter",
    "learning_rate": 1e-4,
    "lr_scheduler": "cosine",
    "global_batch_size": 128,
    "epochs": 3,
}


def _schema_name(sample: Sample) -> str:
    if isinstance(sample, GtiSample):
        return "gti_sample"
    if isinstance(sample, SeqSample):
        return "seq_sample"
    return "eval_sample"


def mix_training_samples(
    gti: Sequence[GtiSample],
    seq: Sequence[SeqSample],
    gti_repeat: int = 1,
    seq_repeat: int = 1,
) -> list[Sample]:
    """Concatenate both tasks, repeating each the requested number of times."""
    if gti_repeat < 0 or seq_repeat < 0:
        raise PreconditionError("Repeat counts must be >= 0")
    return [*list(gti) * gti_repeat, *list(seq) * seq_repeat]


def export_jsonl(
    samples: Iterable[Sample], path: Path | str, seed: int | None = None
) -> int:
    """Validate and write samples; a seed shuffles them deterministically.

    Returns the number of lines written.
    """
    rows = []
    for sample in samples:
        row = sample.to_dict()
        validate_instance(row, _schema_name(sample))
        rows.append(row)
    if seed is not None:
        random.Random(seed).shuffle(rows)
    count = write_jsonl(path, rows)
    logger.info("Wrote %d samples to %s", count, path)
    return count


def read_eval_samples(path: Path | str) -> list[EvalSample]:
    samples = []
    for row in iter_jsonl(path):
        validate_instance(row, "eval_sample")
        samples.append(EvalSample.from_dict(row))
    return samples


def write_train_config(
    path: Path | str,
    tid_length: int,
    seed: int,
    counts: dict[str, int],
    compressed: bool,
    templates: PromptTemplates | None = None,
) -> dict[str, Any]:
    """Record trainer hyperparameters and export provenance; not acted on here."""
    tpl = templates or load_default_templates()
    config = {
        **TRAINING_DEFAULTS,
        "template_version": tpl.version,
        "tid_length": tid_length,
        "shuffle_seed": seed,
        "loss_boundary": "loss_start is a character offset into "
        "instruction + '\\n\\n' + input + '\\n' + output",
        "compressed_tids": compressed,
        "sample_counts": counts,
    }
    write_json(path, config)
    return config
