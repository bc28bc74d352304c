"""Tests for ingestion, k-core filtering, sequences and cross-domain merging."""

import gzip
import json

import networkx as nx
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tidkit.corpus import (
    Corpus,
    InteractionRecord,
    InteractionSequence,
    ItemRecord,
    build_corpus,
    build_sequences,
    domain_split,
    ingest,
    k_core_filter,
    leave_one_out_split,
    load_corpus,
    merge_corpora,
    merge_cross_domain,
    save_corpus,
    truncate_history,
)
from tidkit.corpus.filtering import k_core_mask
from tidkit.corpus.ingest import build_metadata_text
from tidkit.corpus.synthetic import write_synthetic_corpus
from tidkit.errors import EmptyCorpusError, IngestionError, PreconditionError


def _write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def raw_files(tmp_path):
    metadata = _write_lines(
        tmp_path / "meta.jsonl",
        [
            json.dumps(
                {
                    "item_id": "B1",
                    "title": "Great Lash Mascara",
                    "brand": "Maybelline",
                    "categories": [["Beauty", "Makeup", "Eyes"]],
                    "description": "Washable mascara.",
                }
            ),
            "{'asin': 'B2', 'title': 'Velvet Lipstick', 'categories': [['Beauty']]}",
            json.dumps({"item_id": "B3", "title": ""}),
            json.dumps({"item_id": "B1", "title": "Duplicate"}),
            "not a record",
        ],
    )
    reviews = _write_lines(
        tmp_path / "reviews.jsonl",
        [
            json.dumps({"user_id": "U1", "item_id": "B1", "timestamp": 10}),
            json.dumps({"reviewerID": "U1", "asin": "B2", "unixReviewTime": 20}),
            json.dumps({"user_id": "U2", "item_id": "B3", "timestamp": 5}),
            json.dumps({"user_id": "U2", "item_id": "B9", "timestamp": 6}),
            json.dumps({"user_id": "U3", "item_id": "B1"}),
            "{broken",
        ],
    )
    return metadata, reviews


def test_build_metadata_text_order():
    text = build_metadata_text(
        "Great Lash", "Maybelline", [["Beauty", "Makeup"]], "Washable."
    )
    assert text == "Great Lash\nMaybelline\nBeauty > Makeup\nWashable."


def test_ingest_counts_and_mapping(raw_files):
    metadata, reviews = raw_files
    result = ingest(metadata, reviews, domain_tag="beauty")

    assert [item.item_id for item in result.items] == ["B1", "B2"]
    assert result.items[0].metadata_text.startswith("Great Lash Mascara\nMaybelline")
    assert "Beauty > Makeup > Eyes" in result.items[0].metadata_text
    assert result.items[1].domain_tag == "beauty"
    assert [(r.user_id, r.item_id, r.timestamp) for r in result.interactions] == [
        ("U1", "B1", 10),
        ("U1", "B2", 20),
    ]
    assert result.counters() == {
        "malformed_metadata_lines": 1,
        "malformed_review_lines": 2,
        "items_without_metadata": 1,
        "duplicate_items": 1,
        "unresolved_interactions": 2,
    }


def test_ingest_reads_gzip(tmp_path):
    meta = tmp_path / "meta.jsonl.gz"
    with gzip.open(meta, "wt", encoding="utf-8") as f:
        f.write(json.dumps({"asin": "A1", "title": "Kettle"}) + "\n")
    reviews = tmp_path / "reviews.jsonl.gz"
    with gzip.open(reviews, "wt", encoding="utf-8") as f:
        review = {"reviewerID": "U", "asin": "A1", "unixReviewTime": 1}
        f.write(json.dumps(review) + "\n")

    result = ingest(meta, reviews)
    assert len(result.items) == 1
    assert len(result.interactions) == 1


def test_ingest_skips_undecodable_lines(tmp_path):
    meta = _write_lines(
        tmp_path / "meta.jsonl",
        [json.dumps({"item_id": "A1", "title": "Kettle", "categories": 5})],
    )
    good = json.dumps({"user_id": "U", "item_id": "A1", "timestamp": 1}).encode()
    reviews = tmp_path / "reviews.jsonl"
    reviews.write_bytes(b"\n".join([good, b"\xff\xfe garbage", good]) + b"\n")

    result = ingest(meta, reviews)
    assert result.malformed_review_lines == 1
    assert len(result.interactions) == 2
    assert result.items[0].metadata_text == "Kettle\n5"


@pytest.mark.parametrize(
    "line",
    [
        "{[1]: 2}",
        "[" * 10000,
        "{'asin': " + "(" * 10000,
    ],
)
def test_ingest_counts_unparseable_literals(tmp_path, line):
    kettle = json.dumps({"item_id": "A1", "title": "Kettle"})
    meta = _write_lines(tmp_path / "meta.jsonl", [line, kettle])
    reviews = _write_lines(
        tmp_path / "reviews.jsonl",
        [json.dumps({"user_id": "U", "item_id": "A1", "timestamp": 1})],
    )
    result = ingest(meta, reviews)
    assert result.malformed_metadata_lines == 1
    assert [item.item_id for item in result.items] == ["A1"]


def test_scalar_categories_are_kept_as_text():
    assert build_metadata_text("Kettle", "", 5, "") == "Kettle\n5"
    assert build_metadata_text("Kettle", "", "Kitchen", "") == "Kettle\nKitchen"
    assert build_metadata_text("Kettle", "", ["Home", "Kitchen"], "") == (
        "Kettle\nHome > Kitchen"
    )


def test_ingest_missing_file(tmp_path):
    with pytest.raises(IngestionError):
        ingest(tmp_path / "nope.jsonl", tmp_path / "nope2.jsonl")


def _records(pairs):
    return [InteractionRecord(u, i, t) for t, (u, i) in enumerate(pairs)]


def test_k_core_cascade_removes_chain():
    block = [("ua", "ia"), ("ua", "ib"), ("ub", "ia"), ("ub", "ib")]
    chain = [("u1", "ia"), ("u1", "i1"), ("u2", "i1"), ("u2", "i2"), ("u3", "i2")]
    survivors = k_core_filter(_records(block + chain), k=2)
    assert {(r.user_id, r.item_id) for r in survivors} == set(block)


def test_k_core_chain_alone_is_empty():
    chain = [("u1", "i1"), ("u1", "i2"), ("u2", "i2"), ("u2", "i3"), ("u3", "i3")]
    with pytest.raises(EmptyCorpusError):
        k_core_filter(_records(chain), k=2)


def test_k_core_counts_duplicates():
    pairs = [("u1", "i1"), ("u1", "i1"), ("u2", "i1")]
    # u1 reaches degree 2 only through the repeated pair.
    survivors = k_core_filter(_records(pairs), k=2)
    assert [(r.user_id, r.item_id) for r in survivors] == [("u1", "i1"), ("u1", "i1")]


def test_k_core_rejects_bad_k():
    with pytest.raises(PreconditionError):
        k_core_filter(_records([("u", "i")]), k=0)


@settings(max_examples=100, deadline=None)
@given(
    pairs=st.sets(
        st.tuples(st.integers(0, 11), st.integers(0, 11)), min_size=1, max_size=80
    ),
    k=st.integers(1, 4),
)
def test_k_core_matches_graph_core(pairs, k):
    pairs = sorted(pairs)
    df = pd.DataFrame(
        {"user_id": [f"u{u}" for u, _ in pairs], "item_id": [f"i{i}" for _, i in pairs]}
    )
    kept = {
        (u, i) for (u, i), keep in zip(pairs, k_core_mask(df, k).tolist()) if keep
    }

    graph = nx.Graph()
    graph.add_edges_from((("u", u), ("i", i)) for u, i in pairs)
    core = nx.k_core(graph, k)
    expected = set()
    for a, b in core.edges():
        user, item = (a, b) if a[0] == "u" else (b, a)
        expected.add((user[1], item[1]))
    assert kept == expected

    records = _records([(f"u{u}", f"i{i}") for u, i in pairs])
    survivors = [r for r, keep in zip(records, k_core_mask(df, k).tolist()) if keep]
    if survivors:
        assert k_core_filter(survivors, k) == survivors


def test_build_sequences_orders_and_drops_short():
    records = [
        InteractionRecord("u2", "c", 30),
        InteractionRecord("u1", "b", 20),
        InteractionRecord("u1", "a", 10),
        InteractionRecord("u1", "z", 20),
        InteractionRecord("u2", "d", 40),
    ]
    result = build_sequences(records)
    assert result.dropped_short == 1
    assert len(result.sequences) == 1
    seq = result.sequences[0]
    assert seq.user_id == "u1"
    # Equal timestamps keep input order.
    assert seq.items == ("a", "b", "z")
    assert seq.split_marks == (1, 2)


def test_leave_one_out_split():
    split = leave_one_out_split(["a", "b", "c", "d"])
    assert split.train == ("a", "b")
    assert split.valid == "c"
    assert split.test == "d"
    with pytest.raises(PreconditionError):
        leave_one_out_split(["a", "b"])


def test_truncate_history():
    assert truncate_history(["a", "b", "c"], 2) == ("b", "c")
    assert truncate_history(["a"], 5) == ("a",)


def test_sequence_rejects_unordered_timestamps():
    with pytest.raises(PreconditionError):
        InteractionSequence("u", ("a", "b"), (2, 1))


def _single_domain(tag, sequences):
    items = {
        item: ItemRecord(item, item.upper(), f"{item} metadata", tag)
        for seq in sequences
        for item in seq.items
    }
    return Corpus(items=items, sequences=sequences, domain_tags=(tag,))


def test_cross_domain_interleaving_and_splits():
    corpus_a = _single_domain(
        "A", [InteractionSequence("u1", ("a1", "a2"), (1, 3))]
    )
    corpus_b = _single_domain(
        "B",
        [
            InteractionSequence("u1", ("b1", "b2"), (2, 4)),
            InteractionSequence("u9", ("b3", "b4"), (1, 2)),
        ],
    )
    merged = merge_cross_domain(corpus_a, corpus_b)

    assert merged.domain_tags == ("A", "B")
    assert [s.user_id for s in merged.sequences] == ["u1"]
    seq = merged.sequences[0]
    assert seq.items == ("a1", "b1", "a2", "b2")
    assert seq.domains == ("A", "B", "A", "B")
    assert seq.domain_marks == {"A": (0, 2), "B": (1, 3)}
    assert domain_split(seq, "A") == (("a1", "b1"), "a2")
    assert domain_split(seq, "B") == (("a1", "b1", "a2"), "b2")
    assert domain_split(seq, "B", mode="valid") == (("a1",), "b1")
    assert domain_split(seq, "A", mode="valid") is None
    assert "b3" not in merged.items


def test_cross_domain_equal_timestamps_put_first_corpus_first():
    corpus_a = _single_domain("A", [InteractionSequence("u", ("a1",), (5,))])
    corpus_b = _single_domain("B", [InteractionSequence("u", ("b1",), (5,))])
    seq = merge_cross_domain(corpus_b, corpus_a).sequences[0]
    assert seq.items == ("b1", "a1")


def test_cross_domain_renames_colliding_items():
    corpus_a = _single_domain("A", [InteractionSequence("u", ("x",), (1,))])
    corpus_b = _single_domain("B", [InteractionSequence("u", ("x",), (2,))])
    merged = merge_cross_domain(corpus_a, corpus_b)
    assert merged.sequences[0].items == ("x", "B:x")
    assert set(merged.items) == {"x", "B:x"}


def test_cross_domain_needs_overlap():
    corpus_a = _single_domain("A", [InteractionSequence("u1", ("a",), (1,))])
    corpus_b = _single_domain("B", [InteractionSequence("u2", ("b",), (1,))])
    with pytest.raises(EmptyCorpusError):
        merge_cross_domain(corpus_a, corpus_b)


def test_merge_corpora_prefixes_users():
    corpus_a = _single_domain(
        "A", [InteractionSequence("u", ("a1", "a2", "a3"), (1, 2, 3))]
    )
    corpus_b = _single_domain(
        "B", [InteractionSequence("u", ("b1", "b2", "b3"), (1, 2, 3))]
    )
    merged = merge_corpora([corpus_a, corpus_b])
    assert [s.user_id for s in merged.sequences] == ["A:u", "B:u"]
    assert merged.sequences[1].domains == ("B", "B", "B")

    shared = merge_corpora([corpus_a, corpus_b], shared_users=True)
    assert [s.user_id for s in shared.sequences] == ["u"]
    assert shared.sequences[0].items == ("a1", "b1", "a2", "b2", "a3", "b3")


def test_merge_corpora_duplicate_tags():
    corpus = _single_domain("A", [InteractionSequence("u", ("a",), (1,))])
    with pytest.raises(PreconditionError):
        merge_corpora([corpus, corpus])


def test_synthetic_corpus_survives_filtering(tmp_path):
    metadata, reviews = write_synthetic_corpus(tmp_path)
    corpus = build_corpus(ingest(metadata, reviews), k=5, domain_tag="synthetic")
    assert corpus.stats.to_dict() == {
        "user_count": 250,
        "item_count": 200,
        "interaction_count": 2000,
    }
    assert corpus.notes["duplicate_interactions"] == "kept"


def test_save_load_corpus_is_deterministic(tmp_path):
    metadata, reviews = write_synthetic_corpus(tmp_path / "raw", n_items=40, n_users=60)
    corpus = build_corpus(ingest(metadata, reviews), k=2)
    first = save_corpus(corpus, tmp_path / "one")
    second = save_corpus(load_corpus(first), tmp_path / "two")
    for name in ("items.jsonl", "sequences.jsonl", "stats.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
