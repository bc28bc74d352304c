"""Integrative instruction fine-tuning data export."""

from tidkit.iift.export import (
    export_jsonl,
    mix_training_samples,
    read_eval_samples,
    write_train_config,
)
from tidkit.iift.samples import (
    EvalSample,
    GtiSample,
    SampleBuild,
    SeqSample,
    build_eval_samples,
    build_gti_samples,
    build_seq_samples,
    render_item,
    training_prefix,
)

__all__ = [
    "EvalSample",
    "GtiSample",
    "SampleBuild",
    "SeqSample",
    "build_eval_samples",
    "build_gti_samples",
    "build_seq_samples",
    "export_jsonl",
    "mix_training_samples",
    "read_eval_samples",
    "render_item",
    "training_prefix",
    "write_train_config",
]
