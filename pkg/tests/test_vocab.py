"""Tests for vocabulary statistics, K-means and core-term compression."""

import numpy as np
import pytest

from tidkit.ctg.terms import TermIdSequence
from tidkit.data.store import read_json, read_jsonl
from tidkit.errors import PreconditionError, UncoveredTermError
from tidkit.services import HashingEmbedder
from tidkit.vocab import (
    CoreTermMap,
    build_core_term_map,
    build_vocabulary,
    compress_tids,
    embed_terms,
    kmeans,
    write_compression_outputs,
)


def _tid(*terms):
    return TermIdSequence(tuple(terms))


@pytest.fixture
def sample_tids():
    return {
        "i1": _tid("Phone", "Android", "Budget", "6-Inch", "Dual-Sim"),
        "i2": _tid("Phone", "Android", "Budget", "Case", "Black"),
    }


def test_vocabulary_counts(sample_tids):
    vocab = build_vocabulary(sample_tids)
    assert vocab.total_unique == 7
    assert vocab.counts["Phone"] == 2
    assert vocab.counts["Case"] == 1
    assert vocab.terms == sorted(vocab.terms)
    assert "Budget" in vocab


def test_vocabulary_single_item(sample_tids):
    vocab = build_vocabulary({"i1": sample_tids["i1"]})
    assert vocab.total_unique == 5
    assert set(vocab.counts.values()) == {1}


def test_vocabulary_empty():
    with pytest.raises(PreconditionError):
        build_vocabulary({})


def test_kmeans_one_cluster_per_point():
    points = np.random.default_rng(0).normal(size=(6, 3))
    result = kmeans(points, 6)
    assert sorted(result.labels.tolist()) == list(range(6))
    assert result.objective == 0.0


def test_kmeans_single_cluster_is_mean():
    points = np.random.default_rng(1).normal(size=(15, 4))
    result = kmeans(points, 1)
    np.testing.assert_allclose(result.centroids[0], points.mean(axis=0), atol=1e-12)
    total_variance = float(np.sum((points - points.mean(axis=0)) ** 2))
    assert result.objective == pytest.approx(total_variance, rel=1e-9)


def test_kmeans_separates_blobs():
    rng = np.random.default_rng(2)
    blob_a = rng.normal(loc=(0.0, 0.0), scale=0.5, size=(10, 2))
    blob_b = rng.normal(loc=(10.0, 10.0), scale=0.5, size=(10, 2))
    points = np.vstack([blob_a, blob_b])
    result = kmeans(points, 2, seed=5)
    labels = result.labels.tolist()
    assert len(set(labels[:10])) == 1
    assert len(set(labels[10:])) == 1
    assert labels[0] != labels[10]
    membership_sse = sum(
        float(np.sum((blob - blob.mean(axis=0)) ** 2)) for blob in (blob_a, blob_b)
    )
    assert result.objective == pytest.approx(membership_sse, rel=1e-9)


def test_kmeans_objective_never_increases():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 40))
        points = rng.normal(size=(n, int(rng.integers(1, 5))))
        k = int(rng.integers(1, n))
        history = kmeans(points, k, seed=seed).objective_history
        for before, after in zip(history, history[1:]):
            assert after <= before + 1e-9 * max(1.0, before)


def test_kmeans_is_deterministic():
    points = np.random.default_rng(4).normal(size=(30, 3))
    first = kmeans(points, 4, seed=9)
    second = kmeans(points, 4, seed=9)
    np.testing.assert_array_equal(first.labels, second.labels)
    np.testing.assert_array_equal(first.centroids, second.centroids)


def test_kmeans_identical_points_fill_every_cluster():
    result = kmeans(np.ones((5, 2)), 3)
    assert len(set(result.labels.tolist())) == 3
    assert result.objective == 0.0


@pytest.mark.parametrize("k", [0, 4])
def test_kmeans_rejects_bad_k(k):
    with pytest.raises(PreconditionError):
        kmeans(np.zeros((3, 2)), k)


def test_full_size_compression_is_identity(sample_tids):
    vocab = build_vocabulary(sample_tids)
    term_index = embed_terms(vocab, HashingEmbedder(dim=16))
    core_map, _ = build_core_term_map(term_index, vocab.total_unique)
    assert compress_tids(sample_tids, core_map) == sample_tids


def test_core_term_map_properties():
    terms = [f"Term-{j}" for j in range(20)]
    tids = {f"i{j}": _tid(*terms[j : j + 3]) for j in range(18)}
    vocab = build_vocabulary(tids)
    term_index = embed_terms(vocab, HashingEmbedder(dim=8))
    core_map, result = build_core_term_map(term_index, 4, seed=1)

    assert core_map.k == 4
    assert set(core_map.assignment) == set(vocab.terms)
    assert set(core_map.core_terms) <= set(vocab.terms)
    assert set(core_map.assignment.values()) == set(core_map.core_terms)
    assert sum(core_map.member_counts().values()) == vocab.total_unique

    compressed = compress_tids(tids, core_map)
    assert {t for tid in compressed.values() for t in tid.terms} <= set(
        core_map.core_terms
    )
    assert all(len(compressed[i]) == len(tids[i]) for i in tids)


def _hand_map():
    vectors = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
    return CoreTermMap(
        core_terms=("Alpha", "Gamma"),
        assignment={"Alpha": "Alpha", "Beta": "Alpha", "Gamma": "Gamma"},
        centroids=np.array([[0.5, 0.0], [10.0, 0.0]]),
        terms=("Alpha", "Beta", "Gamma"),
        term_vectors=vectors,
    )


def test_compression_replaces_duplicate_core():
    compressed = compress_tids({"i": _tid("Alpha", "Beta")}, _hand_map())
    assert compressed["i"].terms == ("Alpha", "Gamma")


def test_compression_uncovered_term():
    with pytest.raises(UncoveredTermError, match="Delta"):
        compress_tids({"i": _tid("Delta")}, _hand_map())


def test_compression_tid_longer_than_k():
    with pytest.raises(PreconditionError):
        compress_tids({"i": _tid("Alpha", "Beta", "Gamma")}, _hand_map())


def test_write_compression_outputs(tmp_path, sample_tids):
    vocab = build_vocabulary(sample_tids)
    term_index = embed_terms(vocab, HashingEmbedder(dim=16))
    core_map, result = build_core_term_map(term_index, 5, seed=3)
    write_compression_outputs(
        tmp_path / "core_terms.jsonl",
        tmp_path / "compression_meta.json",
        core_map,
        result,
        seed=3,
        vocabulary_size=vocab.total_unique,
        extra={"export_order": "compressed"},
    )
    rows = read_jsonl(tmp_path / "core_terms.jsonl")
    assert len(rows) == 5
    assert sum(r["members"] for r in rows) == 7
    meta = read_json(tmp_path / "compression_meta.json")
    assert meta["k"] == 5
    assert meta["seed"] == 3
    assert meta["vocabulary_size"] == 7
    assert meta["export_order"] == "compressed"
