"""Tests for the candidate library and dual-track grounding."""

import random
import time
from fractions import Fraction

import pytest

from tidkit.ctg.terms import TermIdSequence
from tidkit.data.store import read_jsonl
from tidkit.errors import PreconditionError
from tidkit.grounding import (
    DIRECT,
    NONE,
    STRUCTURAL,
    build_library,
    dump_library_jsonl,
    ground,
    ground_beam,
    ground_structural,
    ground_structural_brute_force,
    read_library,
    structural_score,
    write_collisions,
    write_library,
)


def _tid(text):
    return TermIdSequence.from_canonical(text)


@pytest.fixture
def library():
    tids = {
        "phone-a": _tid("Phone, Android, Budget, 6-Inch, Dual-Sim"),
        "phone-b": _tid("Phone, Android, Budget, 6-Inch, Dual-Sim"),
        "phone-c": _tid("Phone, Ios, Premium, 6-Inch, Esim"),
        "case-a": _tid("Case, Android, Budget, Silicone, Black"),
        "mat-a": _tid("Yoga-Mat, Non-Slip, Purple, Travel, Foam"),
    }
    popularity = {"phone-a": 3, "phone-b": 7, "phone-c": 7, "case-a": 1}
    return build_library(tids, popularity)


def test_full_match_weight_sum():
    tid = _tid("A, B, C, D, E")
    assert structural_score(tid, tid) == pytest.approx(1.45, abs=1e-12)


def test_prefix_match_weight_sum():
    score = structural_score(_tid("A, B, X, Y, Z"), _tid("A, B, C, D, E"))
    assert score == pytest.approx(5 / 6, abs=1e-12)


def test_library_indexes(library):
    assert len(library) == 5
    assert library.tid_length == 5
    assert library.pop("mat-a") == 0
    canonical = "Phone, Android, Budget, 6-Inch, Dual-Sim"
    assert library.direct_index[canonical] == ("phone-b", "phone-a")
    assert library.positional_index[(0, "Phone")] == ("phone-b", "phone-c", "phone-a")
    [collision] = library.collisions()
    assert collision.item_ids == ("phone-a", "phone-b")


def test_empty_library():
    with pytest.raises(PreconditionError):
        build_library({})


def test_direct_collision_prefers_popular_item(library):
    result = ground(_tid("Phone, Android, Budget, 6-Inch, Dual-Sim"), library)
    assert result.track == DIRECT
    assert result.item_id == "phone-b"


def test_structural_fallback(library):
    result = ground(_tid("Case, Android, Budget, Leather, Brown"), library)
    assert result.track == STRUCTURAL
    assert result.item_id == "case-a"
    assert result.score == pytest.approx(1 / 2 + 1 / 3 + 1 / 4)


def test_structural_tie_breaks_on_popularity(library):
    # Matches phone-a, phone-b and phone-c on position 0 only.
    result = ground(_tid("Phone, Windows, Rugged"), library)
    assert result.item_id == "phone-b"
    assert result.score == pytest.approx(0.5)


def test_exact_tie_between_weight_subsets():
    tids = {
        "first": _tid("A, X1, X2, X3, X4"),
        "second": _tid("Y0, B, Y2, Y3, E"),
    }
    library = build_library(tids, {"first": 0, "second": 5})
    generated = _tid("A, B, C, D, E")
    # 1/2 against 1/3 + 1/6: popularity decides.
    assert ground(generated, library).item_id == "second"
    assert ground(generated, library, brute_force=True).item_id == "second"


def test_no_overlap_is_ungrounded(library):
    result = ground(_tid("Kettle, Steel"), library)
    assert result.track == NONE
    assert result.item_id is None
    assert not result.grounded


def _oracle(generated, tids, popularity):
    canonical = generated.canonical()
    exact = [i for i, t in tids.items() if t.canonical() == canonical]
    if exact:
        return min(exact, key=lambda i: (-popularity[i], i)), DIRECT
    scores = {}
    for item_id, tid in tids.items():
        pairs = enumerate(zip(generated, tid))
        score = sum((Fraction(1, p + 2) for p, (a, b) in pairs if a == b), Fraction(0))
        if score > 0:
            scores[item_id] = score
    if not scores:
        return None, NONE
    return min(scores, key=lambda i: (-scores[i], -popularity[i], i)), STRUCTURAL


ALPHABET = [f"Term-{j}" for j in range(20)]


def _random_tid(rng, length):
    return TermIdSequence(tuple(rng.sample(ALPHABET, length)))


def test_grounding_matches_exhaustive_oracle():
    rng = random.Random(1234)
    started = time.perf_counter()
    matches = 0
    for _ in range(50):
        tids = {f"item{j:03d}": _random_tid(rng, 5) for j in range(100)}
        popularity = {i: rng.randrange(4) for i in tids}
        library = build_library(tids, popularity)
        for _ in range(50):
            if rng.random() < 0.1:
                generated = tids[rng.choice(sorted(tids))]
            else:
                generated = _random_tid(rng, rng.randint(1, 5))
            expected_item, expected_track = _oracle(generated, tids, popularity)
            result = ground(generated, library)
            assert (result.item_id, result.track) == (expected_item, expected_track)
            if result.track == STRUCTURAL:
                pruned = ground_structural(generated, library)
                brute = ground_structural_brute_force(generated, library)
                assert pruned == brute
            matches += 1
    assert matches == 2500
    assert time.perf_counter() - started < 10


def test_ground_beam_dedupes_and_flags(library):
    beam = ground_beam(
        [
            "Phone, Android, Budget, 6-Inch, Dual-Sim",
            ", , ,",
            "phone, android, budget, 6 inch, dual sim",
            "Case, Android, Budget, Leather, Brown",
            "Kettle, Steel",
            "Yoga-Mat, Non-Slip, Purple, Travel, Foam",
        ],
        library,
        k=10,
    )
    assert beam.items == ["phone-b", "case-a", "mat-a"]
    assert beam.validity_flags == [True, False, True, False, False, True]
    assert beam.tracks == [DIRECT, NONE, DIRECT, STRUCTURAL, NONE, DIRECT]
    assert beam.candidate_items[2] == "phone-b"


def test_ground_beam_truncates(library):
    beam = ground_beam(
        [
            "Yoga-Mat, Non-Slip, Purple, Travel, Foam",
            "Case, Android, Budget, Silicone, Black",
            "Phone, Ios, Premium, 6-Inch, Esim",
        ],
        library,
        k=2,
    )
    assert beam.items == ["mat-a", "case-a"]
    assert len(beam.validity_flags) == 3


def test_library_binary_round_trip(tmp_path, library):
    path = tmp_path / "library.bin"
    write_library(path, library)
    loaded = read_library(path)
    assert loaded.item_tids == library.item_tids
    assert loaded.popularity == library.popularity
    assert loaded.direct_index == library.direct_index
    assert path.read_bytes()[:4] == b"TIDL"


def test_library_binary_rejects_bad_files(tmp_path, library):
    bad_magic = tmp_path / "bad.bin"
    bad_magic.write_bytes(b"NOPE\x01\x00\x00\x00")
    with pytest.raises(PreconditionError):
        read_library(bad_magic)

    path = tmp_path / "library.bin"
    write_library(path, library)
    truncated = tmp_path / "truncated.bin"
    truncated.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(PreconditionError):
        read_library(truncated)

    wrong_version = tmp_path / "v2.bin"
    wrong_version.write_bytes(b"TIDL\x02\x00\x00\x00\x00\x00\x00\x00")
    with pytest.raises(PreconditionError):
        read_library(wrong_version)


def test_library_dumps(tmp_path, library):
    assert dump_library_jsonl(tmp_path / "library.jsonl", library) == 5
    rows = read_jsonl(tmp_path / "library.jsonl")
    assert rows[0] == {
        "item_id": "case-a",
        "terms": ["Case", "Android", "Budget", "Silicone", "Black"],
        "popularity": 1,
    }
    assert write_collisions(tmp_path / "collisions.jsonl", library) == 1
