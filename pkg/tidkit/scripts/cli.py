"""``tidkit`` command line.

Each command runs one pipeline stage against ``--workdir``; ``smoke`` runs the
whole offline pipeline on the bundled synthetic corpus.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Sequence

from jsonschema import ValidationError

from tidkit.config import PipelineConfig, load_config
from tidkit.data.workdir import Workdir
from tidkit.errors import TidkitError
from tidkit.grounding import read_library
from tidkit.iift import read_eval_samples
from tidkit.scripts import smoke, stages
from tidkit.services import (
    EmbeddingClient,
    GenerationClient,
    HashingEmbedder,
    OpenAIChatClient,
    OpenAIEmbeddingClient,
)

logger = logging.getLogger("tidkit")


def get_embedder(config: PipelineConfig, mock: bool) -> EmbeddingClient:
    """Embedding client: hashed bag-of-words offline, the service otherwise."""
    if mock:
        return HashingEmbedder(smoke.SMOKE_EMBED_DIM)
    return OpenAIEmbeddingClient(config.embedding)


def get_ctg_generator(config: PipelineConfig, mock: bool) -> GenerationClient:
    if mock:
        corpus = stages.load_workdir_corpus(Workdir(config.workdir))
        return smoke.ctg_oracle(corpus, config.tid_length)
    return OpenAIChatClient(config.chat)


def get_eval_generator(
    config: PipelineConfig, mock: bool, split: str
) -> GenerationClient:
    if mock:
        workdir = Workdir(config.workdir)
        library = read_library(workdir.require(workdir.library_bin, "build-library"))
        path = workdir.eval_test if split == "test" else workdir.eval_valid
        samples = read_eval_samples(workdir.require(path, "export-iift"))
        return smoke.eval_oracle(samples, library, max(config.ks))
    return OpenAIChatClient(config.chat)


def _flag(parser: argparse.ArgumentParser, name: str, dest: str, help: str) -> None:
    parser.add_argument(name, dest=dest, action="store_const", const=True, help=help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tidkit", description="Term-ID generative recommendation pipeline."
    )
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--workdir", help="Directory for all stage outputs")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="Build the filtered corpus from raw files")
    p.add_argument("--metadata", dest="metadata_paths", action="append",
                   help="Metadata file or URL (repeat per dataset)")
    p.add_argument("--reviews", dest="reviews_paths", action="append",
                   help="Reviews file or URL (repeat per dataset)")
    p.add_argument("--domain", dest="domain_tags", action="append",
                   help="Domain tag per dataset")
    p.add_argument("--k-core", dest="k_core", type=int)
    p.add_argument("--union", action="store_true",
                   help="Merge all users instead of intersecting two domains")
    p.add_argument("--shared-users", action="store_true",
                   help="With --union, treat equal user ids as one user")

    p = sub.add_parser("ctg", help="Generate Term IDs for every item")
    p.add_argument("--k", dest="k_neighbors", type=int, help="Neighbors per prompt")
    p.add_argument("--n", dest="tid_length", type=int, help="Terms per TID")
    p.add_argument("--no-exemplar-feedback", dest="exemplar_feedback",
                   action="store_const", const=False,
                   help="Do not show neighbors' assigned TIDs in prompts")
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    p.add_argument("--parse-retries", dest="parse_retries", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--mock", action="store_true", help="Offline mock services")

    p = sub.add_parser("compress", help="K-means the term vocabulary into core terms")
    p.add_argument("--compression-k", dest="compression_k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mock", action="store_true", help="Offline hashed embeddings")

    p = sub.add_parser("export-iift", help="Write instruction-tuning and eval files")
    p.add_argument("--truncation", type=int, help="Most recent items kept")
    _flag(p, "--per-step", "per_step", "Also emit one sample per prefix position")
    p.add_argument("--gti-repeat", dest="gti_repeat", type=int)
    p.add_argument("--seq-repeat", dest="seq_repeat", type=int)
    p.add_argument("--seed", type=int, help="Shuffle seed")

    sub.add_parser("build-library", help="Index TIDs for grounding")

    p = sub.add_parser("ground", help="Ground TID strings read from stdin")
    _flag(p, "--brute-force", "brute_force", "Score every item")

    p = sub.add_parser("eval", help="Score a generator on eval samples")
    p.add_argument("--split", choices=("test", "valid"), default="test")
    p.add_argument("--ks", help="Comma-separated cutoffs, e.g. 5,10")
    p.add_argument("--max-new-tokens", dest="max_new_tokens", type=int)
    _flag(p, "--pooled", "pooled_metrics", "Pool VR/DHR over all candidates")
    _flag(p, "--brute-force", "brute_force", "Score every item when grounding")
    p.add_argument("--mock", action="store_true", help="Target-aware mock generator")

    p = sub.add_parser("smoke", help="Offline end-to-end run on a synthetic corpus")
    p.add_argument("--seed", type=int)

    sub.add_parser("report", help="Render summary.md from the workdir")
    return parser


_NON_CONFIG = {"config", "verbose", "command", "mock", "union", "shared_users", "split"}


def overrides_from(args: argparse.Namespace) -> dict[str, Any]:
    return {
        key: value
        for key, value in vars(args).items()
        if key not in _NON_CONFIG and value is not None
    }


def dispatch(args: argparse.Namespace, config: PipelineConfig) -> None:
    command = args.command
    if command == "ingest":
        stages.run_ingest(config, union=args.union, shared_users=args.shared_users)
    elif command == "ctg":
        stages.run_ctg(
            config,
            get_embedder(config, args.mock),
            get_ctg_generator(config, args.mock),
        )
    elif command == "compress":
        stages.run_compress(config, get_embedder(config, args.mock))
    elif command == "export-iift":
        stages.run_export(config)
    elif command == "build-library":
        stages.run_build_library(config)
    elif command == "ground":
        stages.run_ground(config, sys.stdin, sys.stdout)
    elif command == "eval":
        generator = get_eval_generator(config, args.mock, args.split)
        run = stages.run_eval(config, generator, split=args.split)
        print(json.dumps(run.report.to_dict(), indent=2))
    elif command == "smoke":
        smoke.run_smoke(config)
    elif command == "report":
        stages.run_report(config)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        config = load_config(args.config, overrides_from(args))
        dispatch(args, config)
    except (TidkitError, ValidationError, OSError) as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
