"""Term vocabulary statistics and K-means semantic compression."""

from tidkit.vocab.compression import (
    CoreTermMap,
    build_core_term_map,
    compress_tids,
    embed_terms,
    write_compression_outputs,
)
from tidkit.vocab.kmeans import KMeansResult, kmeans
from tidkit.vocab.vocabulary import TermVocabulary, build_vocabulary

__all__ = [
    "CoreTermMap",
    "KMeansResult",
    "TermVocabulary",
    "build_core_term_map",
    "build_vocabulary",
    "compress_tids",
    "embed_terms",
    "kmeans",
    "write_compression_outputs",
]
