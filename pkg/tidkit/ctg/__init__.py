"""Context-aware Term Generation.

Neighbor retrieval over item embeddings, prompt assembly, response parsing
and corpus-wide Term-ID generation.
"""

from tidkit.ctg.generation import (
    CtgOptions,
    CtgResult,
    embed_corpus,
    generate_all_tids,
    generation_order,
)
from tidkit.ctg.neighbors import (
    EmbeddingIndex,
    NeighborSet,
    all_neighbors,
    cosine_similarity,
    top_k_neighbors,
)
from tidkit.ctg.prompts import build_ctg_prompt, target_key
from tidkit.ctg.terms import (
    TermIdSequence,
    normalize_term,
    parse_tid_lenient,
    parse_tid_response,
    read_tid_file,
    write_tid_file,
)

__all__ = [
    "CtgOptions",
    "CtgResult",
    "EmbeddingIndex",
    "NeighborSet",
    "TermIdSequence",
    "all_neighbors",
    "build_ctg_prompt",
    "cosine_similarity",
    "embed_corpus",
    "generate_all_tids",
    "generation_order",
    "normalize_term",
    "parse_tid_lenient",
    "parse_tid_response",
    "read_tid_file",
    "target_key",
    "top_k_neighbors",
    "write_tid_file",
]
