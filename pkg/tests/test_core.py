"""Domain type and helper behavior."""

import numpy as np
import pytest

from waveseq import (
    AlignConfig,
    AlignmentResult,
    ConfigMismatch,
    EmptySequence,
    LengthOverflow,
    NEG_INF,
    ScoringScheme,
    check_length_bounds,
    decode_sequence,
    encode_sequence,
    gap_cost,
    merge_ops,
    rescore_alignment,
    substitution_score,
    validate_config,
)


def test_encode_round_trip():
    seq = encode_sequence("r1", "acgtACGT")
    assert len(seq) == 8
    assert decode_sequence(seq) == "ACGTACGT"
    assert not seq.has_ambiguous


def test_encode_flags_non_acgt():
    seq = encode_sequence("r1", "ANGT")
    assert seq.has_ambiguous
    assert list(seq.flags) == [False, True, False, False]
    assert decode_sequence(seq) == "ANGT"
    # a flagged symbol scores as mismatch even against its own code
    scheme = ScoringScheme()
    assert substitution_score(scheme, 0, 0, True, False) == scheme.mismatch_score
    assert substitution_score(scheme, 0, 0, False, False) == scheme.match_score


def test_encode_rejects_empty():
    with pytest.raises(EmptySequence):
        encode_sequence("r1", "")


def test_window_and_reversed():
    seq = encode_sequence("r1", "ACGTT")
    win = seq.window(1, 4)
    assert decode_sequence(win) == "CGT"
    rev = seq.reversed_copy()
    assert decode_sequence(rev) == "TTGCA"
    # windows are views, reversed copies are not
    assert win.codes.base is seq.codes or win.codes.base is seq.codes.base
    assert rev.codes.base is None


def test_packed_data_layout():
    seq = encode_sequence("r1", "ACGT")
    # codes 0,1,2,3 in 2-bit fields, low bits first
    assert seq.data == bytes([0b11100100])


def test_gap_cost_models():
    affine = ScoringScheme(2, -1, 3, 1, "affine")
    linear = ScoringScheme(2, -1, 3, 3, "linear")
    assert gap_cost(affine, 1) == 3
    assert gap_cost(affine, 4) == 3 + 3 * 1
    assert gap_cost(linear, 1) == 3
    assert gap_cost(linear, 4) == 12
    assert gap_cost(affine, 0) == 0


def test_scheme_validation():
    with pytest.raises(ConfigMismatch):
        ScoringScheme(2, -1, -1, 1, "affine")
    with pytest.raises(ConfigMismatch):
        ScoringScheme(2, -1, 2, 1, "convex")
    with pytest.warns(UserWarning):
        ScoringScheme(2, -1, 1, 5, "affine")


def test_validate_config_normalizes_nu():
    scheme = ScoringScheme()
    local = validate_config(AlignConfig("local", "affine"), scheme)
    assert local.nu == 0
    glob = validate_config(AlignConfig("global", "affine"), scheme)
    assert glob.nu == NEG_INF


def test_validate_config_rejects_mismatches():
    scheme = ScoringScheme()
    with pytest.raises(ConfigMismatch):
        validate_config(AlignConfig("sideways", "affine"), scheme)
    with pytest.raises(ConfigMismatch):
        validate_config(AlignConfig("global", "linear"), scheme)
    with pytest.raises(ConfigMismatch):
        validate_config(AlignConfig("global", "affine", "verbose"), scheme)


def test_length_bounds():
    scheme = ScoringScheme()
    check_length_bounds(100_000, 100_000, scheme)
    with pytest.raises(LengthOverflow):
        check_length_bounds(2 ** 28, 2 ** 28, scheme)


def test_merge_ops():
    assert merge_ops([("M", 2), ("M", 2)]) == [("M", 4)]
    assert merge_ops([("M", 1), ("I", 0), ("M", 2)]) == [("M", 3)]
    assert merge_ops([]) == []
    assert merge_ops([("M", 1), ("I", 1), ("I", 2), ("D", 1)]) == [
        ("M", 1), ("I", 3), ("D", 1)]


def test_rescore_alignment():
    q = encode_sequence("q", "ACGT")
    s = encode_sequence("s", "AGT")
    scheme = ScoringScheme(2, -1, 1, 1, "linear")
    res = AlignmentResult(score=5, q_start=0, q_end=4, s_start=0, s_end=3,
                          ops=[("M", 1), ("I", 1), ("M", 2)])
    assert rescore_alignment(res, q, s, scheme) == 5
    # span mismatch is an error, not a silent wrong number
    bad = AlignmentResult(score=5, q_start=0, q_end=4, s_start=0, s_end=3,
                          ops=[("M", 3)])
    with pytest.raises(ValueError):
        rescore_alignment(bad, q, s, scheme)
    only = AlignmentResult(score=0, q_start=0, q_end=4, s_start=0, s_end=3)
    with pytest.raises(ValueError):
        rescore_alignment(only, q, s, scheme)
