"""Pipeline stages: one function per CLI command, all rooted at a workdir."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, TextIO

from tidkit.config import PipelineConfig
from tidkit.corpus import (
    Corpus,
    build_corpus,
    ingest,
    load_corpus,
    merge_corpora,
    merge_cross_domain,
    save_corpus,
)
from tidkit.corpus.download import resolve_location
from tidkit.ctg import (
    CtgOptions,
    CtgResult,
    EmbeddingIndex,
    embed_corpus,
    generate_all_tids,
    parse_tid_lenient,
    read_tid_file,
    write_tid_file,
)
from tidkit.data.store import read_json, write_json
from tidkit.data.workdir import Workdir
from tidkit.errors import PreconditionError
from tidkit.evaluation import EvaluationRun, evaluate, write_evaluation
from tidkit.grounding import (
    CandidateLibrary,
    build_library,
    dump_library_jsonl,
    ground,
    read_library,
    write_collisions,
    write_library,
)
from tidkit.iift import (
    build_eval_samples,
    build_gti_samples,
    build_seq_samples,
    export_jsonl,
    mix_training_samples,
    read_eval_samples,
    write_train_config,
)
from tidkit.reports import gather_run_summary, generate_run_summary
from tidkit.services import EmbeddingClient, GenerationClient
from tidkit.vocab import (
    build_core_term_map,
    build_vocabulary,
    compress_tids,
    embed_terms,
    write_compression_outputs,
)

logger = logging.getLogger(__name__)


def workdir_for(config: PipelineConfig) -> Workdir:
    workdir = Workdir(config.workdir).ensure()
    write_json(workdir.resolved_config, config.to_dict())
    return workdir


def load_workdir_corpus(workdir: Workdir) -> Corpus:
    workdir.require(workdir.items, "ingest")
    workdir.require(workdir.sequences, "ingest")
    return load_corpus(workdir.corpus_dir)


def run_ingest(
    config: PipelineConfig, union: bool = False, shared_users: bool = False
) -> Corpus:
    """Ingest one or more (metadata, reviews) pairs into the workdir corpus.

    Two tagged pairs are merged over shared users; more pairs, or ``union``,
    merge all users of every dataset.
    """
    workdir = workdir_for(config)
    pairs = list(zip(config.metadata_paths, config.reviews_paths))
    if not pairs:
        raise PreconditionError("No input files: pass --metadata and --reviews")
    tags: list[str | None] = list(config.domain_tags)
    if len(pairs) > 1 and len(tags) != len(pairs):
        raise PreconditionError("Every dataset needs a --domain tag when merging")
    tags += [None] * (len(pairs) - len(tags))

    corpora = []
    for (metadata, reviews), tag in zip(pairs, tags):
        result = ingest(
            resolve_location(metadata, config.data_raw_dir),
            resolve_location(reviews, config.data_raw_dir),
            domain_tag=tag,
        )
        corpora.append(build_corpus(result, k=config.k_core, domain_tag=tag))

    if len(corpora) == 1:
        corpus = corpora[0]
    elif len(corpora) == 2 and not union:
        corpus = merge_cross_domain(corpora[0], corpora[1])
    else:
        corpus = merge_corpora(corpora, shared_users=shared_users)
    save_corpus(corpus, workdir.corpus_dir)
    logger.info("Corpus written to %s: %s", workdir.corpus_dir, corpus.stats.to_dict())
    return corpus


def _embeddings(
    workdir: Workdir, corpus: Corpus, embedder: EmbeddingClient
) -> EmbeddingIndex:
    if workdir.embeddings.exists():
        index = EmbeddingIndex.load(workdir.embeddings)
        if set(index.ids) == set(corpus.items):
            logger.info("Reusing %s", workdir.embeddings)
            return index
        logger.info("Stale %s; re-embedding", workdir.embeddings)
    index = embed_corpus(corpus, embedder)
    index.save(workdir.embeddings)
    return index


def run_ctg(
    config: PipelineConfig, embedder: EmbeddingClient, generator: GenerationClient
) -> CtgResult:
    workdir = workdir_for(config)
    corpus = load_workdir_corpus(workdir)
    index = _embeddings(workdir, corpus, embedder)
    options = CtgOptions(
        n=config.tid_length,
        k=config.k_neighbors,
        parse_retries=config.parse_retries,
        checkpoint_every=config.checkpoint_every,
        exemplar_feedback=config.exemplar_feedback,
        max_in_flight=config.chat.max_in_flight,
        temperature=config.temperature,
    )
    result = generate_all_tids(
        corpus,
        index,
        generator,
        options,
        checkpoint_path=workdir.ctg_checkpoint,
        failures_path=workdir.ctg_failures,
    )
    write_tid_file(workdir.tids, result.tids)
    if workdir.tids_compressed.exists():
        workdir.tids_compressed.unlink()
        logger.info("Removed compressed TIDs from an earlier run")
    return result


def run_compress(config: PipelineConfig, embedder: EmbeddingClient) -> dict:
    workdir = workdir_for(config)
    if config.compression_k is None:
        raise PreconditionError("compress needs compression_k (--compression-k)")
    tids = read_tid_file(workdir.require(workdir.tids, "ctg"))
    vocabulary = build_vocabulary(tids)
    term_index = embed_terms(vocabulary, embedder)
    core_map, result = build_core_term_map(
        term_index, config.compression_k, seed=config.seed
    )
    write_tid_file(workdir.tids_compressed, compress_tids(tids, core_map))
    order = "after_export" if workdir.iift_train.exists() else "before_export"
    write_compression_outputs(
        workdir.core_terms,
        workdir.compression_meta,
        core_map,
        result,
        seed=config.seed,
        vocabulary_size=vocabulary.total_unique,
        extra={"export_order": order},
    )
    return read_json(workdir.compression_meta)


def run_export(config: PipelineConfig) -> dict:
    workdir = workdir_for(config)
    corpus = load_workdir_corpus(workdir)
    tids_path = workdir.require(workdir.active_tids(), "ctg")
    tids = read_tid_file(tids_path)

    gti = build_gti_samples(corpus, tids)
    seq = build_seq_samples(
        corpus.sequences,
        tids,
        corpus,
        truncation=config.truncation,
        per_step=config.per_step,
    )
    training = mix_training_samples(
        gti.samples, seq.samples, config.gti_repeat, config.seq_repeat
    )
    counts = {
        "gti": len(gti.samples),
        "gti_excluded": gti.skipped,
        "seq": len(seq.samples),
        "seq_skipped": seq.skipped,
        "train_lines": export_jsonl(training, workdir.iift_train, seed=config.seed),
    }
    for mode, path in (("valid", workdir.eval_valid), ("test", workdir.eval_test)):
        built = build_eval_samples(
            corpus.sequences, tids, corpus, mode=mode, truncation=config.truncation
        )
        counts[f"eval_{mode}"] = export_jsonl(built.samples, path)
        counts[f"eval_{mode}_dropped"] = built.skipped
    return write_train_config(
        workdir.train_config,
        tid_length=config.tid_length,
        seed=config.seed,
        counts=counts,
        compressed=tids_path == workdir.tids_compressed,
    )


def run_build_library(config: PipelineConfig) -> CandidateLibrary:
    workdir = workdir_for(config)
    tids = read_tid_file(workdir.require(workdir.active_tids(), "ctg"))
    popularity = load_workdir_corpus(workdir).popularity()
    library = build_library(tids, popularity)
    write_library(workdir.library_bin, library)
    dump_library_jsonl(workdir.library_jsonl, library)
    write_collisions(workdir.collisions, library)
    logger.info(
        "Library: %d items, %d TID keys, %d collisions",
        len(library),
        len(library.direct_index),
        len(library.collisions()),
    )
    return library


def run_ground(
    config: PipelineConfig, queries: Iterable[str], out: TextIO
) -> int:
    """Ground one canonical TID string per line; writes ``item_id\\ttrack\\tscore``."""
    workdir = workdir_for(config)
    library = read_library(workdir.require(workdir.library_bin, "build-library"))
    count = 0
    for line in queries:
        if not line.strip():
            continue
        parsed = parse_tid_lenient(line, library.tid_length)
        if parsed is None:
            out.write("\tnone\t\n")
        else:
            result = ground(parsed, library, brute_force=config.brute_force)
            score = "" if result.score is None else f"{result.score:.12g}"
            out.write(f"{result.item_id or ''}\t{result.track}\t{score}\n")
        count += 1
    return count


def _eval_path(workdir: Workdir, split: str):
    if split not in ("test", "valid"):
        raise PreconditionError(f"Unknown split: {split}")
    return workdir.eval_test if split == "test" else workdir.eval_valid


def run_eval(
    config: PipelineConfig, generator: GenerationClient, split: str = "test"
) -> EvaluationRun:
    workdir = workdir_for(config)
    library = read_library(workdir.require(workdir.library_bin, "build-library"))
    samples = read_eval_samples(
        workdir.require(_eval_path(workdir, split), "export-iift")
    )
    dropped = 0
    if workdir.train_config.exists():
        counts = read_json(workdir.train_config).get("sample_counts", {})
        dropped = counts.get(f"eval_{split}_dropped", 0)
    run = evaluate(
        samples,
        generator,
        library,
        ks=config.ks,
        max_new_tokens=config.max_new_tokens,
        temperature=config.temperature,
        pooled=config.pooled_metrics,
        brute_force=config.brute_force,
        max_in_flight=config.chat.max_in_flight,
        num_dropped=dropped,
    )
    write_evaluation(run, workdir.report, workdir.details)
    return run


def run_report(config: PipelineConfig) -> str:
    workdir = workdir_for(config)
    text = generate_run_summary(gather_run_summary(workdir))
    workdir.summary.write_text(text, encoding="utf-8")
    return text


@dataclass(frozen=True)
class StageOutputs:
    """Paths a smoke run is expected to leave behind."""

    workdir: Workdir

    def missing(self) -> list[str]:
        wd = self.workdir
        expected = [
            wd.items,
            wd.sequences,
            wd.stats,
            wd.embeddings,
            wd.tids,
            wd.library_bin,
            wd.library_jsonl,
            wd.iift_train,
            wd.eval_test,
            wd.report,
            wd.details,
        ]
        return [str(p) for p in expected if not p.exists()]
