"""Shared helpers for the test suite."""

import numpy as np

from waveseq import AlignConfig, ScoringScheme, encode_sequence

BASES = np.array(list("ACGT"))

# every (align_type, gap_model) combination the engine supports
COMBOS = [(at, gm)
          for at in ("global", "local", "semiglobal")
          for gm in ("linear", "affine")]

AFFINE_SCHEMES = (
    ScoringScheme(2, -1, 2, 1, "affine"),
    ScoringScheme(3, -2, 4, 1, "affine"),
    ScoringScheme(1, -3, 2, 2, "affine"),
    ScoringScheme(5, -4, 10, 1, "affine"),
)
LINEAR_SCHEMES = (
    ScoringScheme(2, -1, 2, 2, "linear"),
    ScoringScheme(1, -1, 1, 1, "linear"),
    ScoringScheme(3, -2, 5, 5, "linear"),
)


def scheme_for(gap_model: str, idx: int) -> ScoringScheme:
    pool = AFFINE_SCHEMES if gap_model == "affine" else LINEAR_SCHEMES
    return pool[idx % len(pool)]


def make_cfg(align_type: str, gap_model: str,
             result_mode: str = "score_only") -> AlignConfig:
    return AlignConfig(align_type=align_type, gap_model=gap_model,
                       result_mode=result_mode)


def random_seq(rng: np.random.Generator, name: str, lo: int, hi: int):
    """Random ACGT sequence with length drawn uniformly from [lo, hi]."""
    length = int(rng.integers(lo, hi + 1))
    return encode_sequence(name, "".join(BASES[rng.integers(0, 4, length)]))


def random_text(rng: np.random.Generator, length: int) -> str:
    return "".join(BASES[rng.integers(0, 4, length)])
