"""Tests for context-aware term generation."""

import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tidkit.corpus.models import Corpus, InteractionSequence, ItemRecord
from tidkit.ctg import (
    CtgOptions,
    EmbeddingIndex,
    TermIdSequence,
    build_ctg_prompt,
    cosine_similarity,
    embed_corpus,
    generate_all_tids,
    generation_order,
    normalize_term,
    parse_tid_lenient,
    parse_tid_response,
    read_tid_file,
    target_key,
    top_k_neighbors,
    write_tid_file,
)
from tidkit.ctg.neighbors import all_neighbors
from tidkit.ctg.terms import is_canonical
from tidkit.data.store import read_jsonl
from tidkit.errors import (
    FatalServiceError,
    PreconditionError,
    TidParseError,
    UndefinedSimilarityError,
)
from tidkit.services import GenerationClient, GenerationRequest, HashingEmbedder


def _item(item_id, text=None):
    return ItemRecord(item_id, item_id, text or f"{item_id} product description")


def test_normalize_term():
    assert normalize_term("cell phone") == "Cell-Phone"
    assert normalize_term("  6-inch ") == "6-Inch"
    assert normalize_term("Dual_SIM") == "Dual-Sim"
    assert normalize_term("Café/Crème!") == "Cafe-Creme"
    assert normalize_term("--") == ""


@given(st.text(max_size=60))
def test_normalize_term_is_idempotent(raw):
    once = normalize_term(raw)
    assert normalize_term(once) == once
    if once and len(once) <= 40:
        assert is_canonical(once)


def test_parse_tid_response_normalizes():
    tid = parse_tid_response("cell phone, android, budget, 6-inch, dual sim", 5)
    assert tid.terms == ("Cell-Phone", "Android", "Budget", "6-Inch", "Dual-Sim")


def test_parse_takes_last_schema_line():
    raw = "Here are the terms:\nTerm IDs: [Yoga, Mat, Non-Slip, Purple, Travel]"
    tid = parse_tid_response(raw, 5)
    assert tid.canonical() == "Yoga, Mat, Non-Slip, Purple, Travel"


@pytest.mark.parametrize(
    "raw",
    [
        "phone, android, budget, 6-inch",
        "Phone, phone, android, budget, 6-inch",
        "phone, , android, budget, 6-inch",
        "",
        "phone, android, budget, 6-inch, " + "x" * 41,
    ],
)
def test_parse_failures(raw):
    with pytest.raises(TidParseError):
        parse_tid_response(raw, 5)


def test_parse_lenient_accepts_short_candidates():
    assert parse_tid_lenient("phone, android", 5).terms == ("Phone", "Android")
    assert parse_tid_lenient("a, b, c, d, e, f", 5) is None
    assert parse_tid_lenient("   ", 5) is None


def test_term_id_sequence_rules():
    with pytest.raises(PreconditionError):
        TermIdSequence(())
    with pytest.raises(PreconditionError):
        TermIdSequence(("Phone", "Phone"))
    with pytest.raises(PreconditionError):
        TermIdSequence(("not canonical",))
    assert TermIdSequence.from_canonical("A, B-C").terms == ("A", "B-C")


def test_tid_file_round_trip(tmp_path):
    tids = {
        "b": TermIdSequence(("Phone", "Case")),
        "a": TermIdSequence(("Yoga-Mat", "6-Inch")),
    }
    path = tmp_path / "tids.jsonl"
    assert write_tid_file(path, tids) == 2
    assert [row["item_id"] for row in read_jsonl(path)] == ["a", "b"]
    assert read_tid_file(path) == tids


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0),
        ([1.0, 0.0], [0.0, 1.0], 0.0),
        ([1.0, -2.0], [-1.0, 2.0], -1.0),
    ],
)
def test_cosine_similarity(a, b, expected):
    assert cosine_similarity(a, b) == pytest.approx(expected, abs=1e-9)


def test_cosine_similarity_errors():
    with pytest.raises(UndefinedSimilarityError):
        cosine_similarity([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(PreconditionError):
        cosine_similarity([1.0], [1.0, 0.0])


def test_top_k_ranks_and_breaks_ties():
    index = EmbeddingIndex(
        ["t", "c", "b", "a"],
        np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 1.0]]),
    )
    result = top_k_neighbors("t", index, 2)
    assert result.ids == ["b", "c"]
    assert result.neighbors[0][1] == pytest.approx(2**-0.5)
    assert not result.shortfall


def test_top_k_shortfall():
    index = EmbeddingIndex(["a", "b", "c"], np.eye(3) + 0.1)
    result = top_k_neighbors("a", index, 5)
    assert len(result.neighbors) == 2
    assert result.shortfall
    assert "a" not in result.ids


def test_all_neighbors_matches_brute_force():
    rng = np.random.default_rng(3)
    ids = [f"i{j:02d}" for j in range(30)]
    index = EmbeddingIndex(ids, rng.normal(size=(30, 8)))
    batched = all_neighbors(index, 4, chunk_size=7)
    for item_id in ids:
        row = index.unit[index.position(item_id)]
        others = [j for j in ids if j != item_id]
        scores = sorted(
            (-float(index.unit[index.position(j)] @ row), j) for j in others
        )
        assert batched[item_id].ids == [j for _, j in scores[:4]]


def test_embedding_index_save_load(tmp_path):
    index = EmbeddingIndex(["b", "a"], np.array([[1.0, 2.0], [3.0, 4.0]]))
    index.save(tmp_path / "embeddings.npz")
    loaded = EmbeddingIndex.load(tmp_path / "embeddings.npz")
    assert loaded.ids == ["a", "b"]
    np.testing.assert_array_equal(loaded.raw, index.raw)


def test_prompt_contents():
    target = _item("T1", "Wireless earbuds with charging case")
    neighbors = [_item("N1"), _item("N2")]
    system, user = build_ctg_prompt(
        target, neighbors, 5, neighbor_tids={"N2": TermIdSequence(("Earbuds", "Black"))}
    )
    assert "exactly 5" in system
    assert "Output exactly 5 terms" in user
    assert "Wireless earbuds with charging case" in user
    assert "Assigned Term IDs: Earbuds, Black" in user
    assert user.count("Assigned Term IDs:") == 1
    assert user.index("Item ID: T1") < user.index("Item ID: N1")
    assert build_ctg_prompt(target, neighbors, 5) == build_ctg_prompt(
        target, neighbors, 5
    )


def test_prompt_without_neighbors_keeps_rules():
    _, user = build_ctg_prompt(_item("T1"), [], 7)
    assert "## Similar items" not in user
    assert "## Term format" in user
    assert "exactly 7 terms" in user


def test_target_key():
    _, user = build_ctg_prompt(_item("T1"), [_item("N1")], 5)
    assert target_key(GenerationRequest("s", user)) == "T1"
    assert target_key(GenerationRequest("s", "no header")) is None


def _ctg_corpus(n_items=12):
    items = {
        f"I{j:02d}": _item(f"I{j:02d}", f"product {j} in family {j % 3}")
        for j in range(n_items)
    }
    # I05 is the most popular item, then I03.
    sequences = [
        InteractionSequence("u1", ("I05", "I03", "I05"), (1, 2, 3)),
        InteractionSequence("u2", ("I05", "I03", "I07"), (1, 2, 3)),
    ]
    return Corpus(items=items, sequences=sequences)


class RecordingGenerator(GenerationClient):
    """Answers every CTG prompt with a valid TID unless the item is listed as bad."""

    def __init__(self, bad=(), fatal_after=None):
        self.bad = set(bad)
        self.fatal_after = fatal_after
        self.requests = []
        self._lock = threading.Lock()

    def generate(self, request):
        with self._lock:
            self.requests.append(request)
            if self.fatal_after is not None and len(self.requests) > self.fatal_after:
                raise FatalServiceError("quota exhausted", status_code=403)
        item_id = target_key(request)
        if item_id in self.bad:
            return ["only, four, terms, here"]
        return [f"Id {item_id}, Product, Family, Gadget, Thing"]


@pytest.fixture
def ctg_setup():
    corpus = _ctg_corpus()
    index = embed_corpus(corpus, HashingEmbedder(dim=32))
    return corpus, index


def test_generation_order_by_popularity():
    order = generation_order(_ctg_corpus())
    assert order[:3] == ["I05", "I03", "I07"]
    assert order[3:] == sorted(order[3:])


def test_generate_all_valid(ctg_setup, tmp_path):
    corpus, index = ctg_setup
    client = RecordingGenerator()
    result = generate_all_tids(
        corpus, index, client, CtgOptions(checkpoint_every=5),
        checkpoint_path=tmp_path / "ckpt.jsonl",
        failures_path=tmp_path / "failures.jsonl",
    )
    assert len(result.tids) == len(corpus.items)
    assert result.tids["I00"].terms[0] == "Id-I00"
    assert not result.failures
    assert read_jsonl(tmp_path / "failures.jsonl") == []
    assert len(read_jsonl(tmp_path / "ckpt.jsonl")) == len(corpus.items)


def test_one_item_fails_after_retries(ctg_setup, tmp_path):
    corpus, index = ctg_setup
    client = RecordingGenerator(bad={"I04"})
    result = generate_all_tids(
        corpus, index, client, CtgOptions(parse_retries=3),
        failures_path=tmp_path / "failures.jsonl",
    )
    assert len(result.tids) == len(corpus.items) - 1
    rows = read_jsonl(tmp_path / "failures.jsonl")
    assert [row["item_id"] for row in rows] == ["I04"]
    assert sum(target_key(r) == "I04" for r in client.requests) == 3


def test_exemplar_feedback(ctg_setup):
    corpus, index = ctg_setup
    client = RecordingGenerator()
    generate_all_tids(corpus, index, client, CtgOptions(k=11, max_in_flight=1))
    first, second = client.requests[0], client.requests[1]
    assert target_key(first) == "I05"
    assert "Assigned Term IDs:" not in first.user_text
    assert "Assigned Term IDs: Id-I05, Product" in second.user_text

    client = RecordingGenerator()
    options = CtgOptions(k=11, max_in_flight=1, exemplar_feedback=False)
    generate_all_tids(corpus, index, client, options)
    assert all("Assigned Term IDs:" not in r.user_text for r in client.requests)


def test_fatal_error_checkpoints_then_resumes(ctg_setup, tmp_path):
    corpus, index = ctg_setup
    ckpt = tmp_path / "ckpt.jsonl"
    options = CtgOptions(checkpoint_every=5, max_in_flight=1)

    with pytest.raises(FatalServiceError):
        generate_all_tids(
            corpus, index, RecordingGenerator(fatal_after=7), options, ckpt
        )
    assert len(read_jsonl(ckpt)) == 7

    client = RecordingGenerator()
    result = generate_all_tids(corpus, index, client, options, ckpt)
    assert result.resumed == 7
    assert result.generated == 5
    assert len(result.tids) == 12
    assert len(client.requests) == 5


class _Interrupted(Exception):
    pass


class InterruptingGenerator(RecordingGenerator):
    def generate(self, request):
        if len(self.requests) >= self.fatal_after:
            raise _Interrupted()
        return super().generate(request)


def test_interrupt_loses_at_most_one_checkpoint_interval(ctg_setup, tmp_path):
    corpus, index = ctg_setup
    ckpt = tmp_path / "ckpt.jsonl"
    options = CtgOptions(checkpoint_every=5, max_in_flight=1)
    with pytest.raises(_Interrupted):
        generate_all_tids(
            corpus, index, InterruptingGenerator(fatal_after=8), options, ckpt
        )
    assert len(read_jsonl(ckpt)) == 5

    client = RecordingGenerator()
    result = generate_all_tids(corpus, index, client, options, ckpt)
    assert result.resumed == 5
    assert len(client.requests) == 7
    assert len(result.tids) == 12


def test_missing_embeddings(ctg_setup):
    corpus, _ = ctg_setup
    partial = EmbeddingIndex(["I00", "I01"], np.eye(2))
    with pytest.raises(PreconditionError):
        generate_all_tids(corpus, partial, RecordingGenerator())
