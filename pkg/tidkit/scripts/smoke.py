"""End-to-end smoke run over the bundled synthetic corpus with mock services."""

from __future__ import annotations

import dataclasses
import logging
from typing import Sequence

from tidkit.config import PipelineConfig
from tidkit.corpus import Corpus, load_corpus
from tidkit.corpus.synthetic import write_synthetic_corpus
from tidkit.ctg import TermIdSequence, normalize_term, target_key
from tidkit.ctg.terms import MAX_TERM_LENGTH
from tidkit.errors import SmokeCheckError
from tidkit.evaluation import MetricsReport
from tidkit.grounding import CandidateLibrary, read_library
from tidkit.iift import EvalSample, read_eval_samples
from tidkit.scripts import stages
from tidkit.services import HashingEmbedder, OracleMockGenerator

logger = logging.getLogger(__name__)

SMOKE_EMBED_DIM = 256


def seed_tid(item_id: str, text: str, n: int) -> TermIdSequence:
    """N-1 leading words of ``text`` plus a term derived from the item id."""
    words: list[str] = []
    for raw in text.split():
        term = normalize_term(raw)
        if term and len(term) <= MAX_TERM_LENGTH and term not in words:
            words.append(term)
    terms = words[: n - 1]
    terms += [f"Slot-{j}" for j in range(len(terms) + 1, n)]
    terms.append(normalize_term(f"Id {item_id}")[:MAX_TERM_LENGTH])
    return TermIdSequence(tuple(terms))


def ctg_oracle(corpus: Corpus, n: int) -> OracleMockGenerator:
    """Answers CTG prompts with a title-seeded TID for the target item."""
    responses = {
        item_id: [
            seed_tid(item_id, f"{item.title} {item.metadata_text}", n).canonical()
        ]
        for item_id, item in corpus.items.items()
    }
    return OracleMockGenerator(responses, key_fn=target_key)


def eval_oracle(
    samples: Sequence[EvalSample], library: CandidateLibrary, beam_width: int
) -> OracleMockGenerator:
    """Answers each eval prompt with the target TID first, then other TIDs."""
    keys = sorted(library.direct_index)
    responses: dict[str, list[str]] = {}
    for sample in samples:
        start = keys.index(sample.target_tid)
        others = [keys[(start + j) % len(keys)] for j in range(1, len(keys))]
        responses[sample.input] = [sample.target_tid, *others][:beam_width]
    return OracleMockGenerator(responses)


def run_smoke(config: PipelineConfig) -> MetricsReport:
    """ingest -> ctg -> build-library -> export-iift -> eval, all offline.

    Raises SmokeCheckError unless the target-aware mock reaches recall 1.0 at
    the smallest K.
    """
    workdir = stages.workdir_for(config)
    metadata, reviews = write_synthetic_corpus(workdir.root / "raw", seed=config.seed)
    config = dataclasses.replace(
        config,
        metadata_paths=(str(metadata),),
        reviews_paths=(str(reviews),),
        domain_tags=(),
    )
    stages.run_ingest(config)
    corpus = load_corpus(workdir.corpus_dir)
    stages.run_ctg(
        config, HashingEmbedder(SMOKE_EMBED_DIM), ctg_oracle(corpus, config.tid_length)
    )
    stages.run_build_library(config)
    stages.run_export(config)

    library = read_library(workdir.library_bin)
    samples = read_eval_samples(workdir.eval_test)
    run = stages.run_eval(config, eval_oracle(samples, library, max(config.ks)))
    stages.run_report(config)

    missing = stages.StageOutputs(workdir).missing()
    if missing:
        raise SmokeCheckError(f"Smoke run left no {', '.join(missing)}")
    k = min(config.ks)
    recall = run.report.recall_at[k]
    if recall != 1.0:
        raise SmokeCheckError(
            f"Expected recall@{k} = 1.0 from the oracle, got {recall}"
        )
    logger.info("Smoke run passed: recall@%d = %.1f", k, recall)
    return run.report
