"""Elastic identifier grounding.

Maps generated Term-ID sequences back to catalog items through an exact
string index with a weighted positional fallback.
"""

from tidkit.grounding.binary import (
    dump_library_jsonl,
    read_library,
    write_collisions,
    write_library,
)
from tidkit.grounding.ground import (
    DIRECT,
    NONE,
    STRUCTURAL,
    BeamGrounding,
    GroundingResult,
    ground,
    ground_beam,
    ground_direct,
    ground_structural,
    ground_structural_brute_force,
    structural_score,
)
from tidkit.grounding.library import CandidateLibrary, Collision, build_library

__all__ = [
    "DIRECT",
    "NONE",
    "STRUCTURAL",
    "BeamGrounding",
    "CandidateLibrary",
    "Collision",
    "GroundingResult",
    "build_library",
    "dump_library_jsonl",
    "ground",
    "ground_beam",
    "ground_direct",
    "ground_structural",
    "ground_structural_brute_force",
    "read_library",
    "structural_score",
    "write_collisions",
    "write_library",
]
