"""Linear-memory traceback: correctness, bounds, and memory behavior."""

import numpy as np
import pytest

from conftest import make_cfg, random_seq, scheme_for
from waveseq import (
    AllocationMeter,
    ScoringScheme,
    T_EXPLICIT,
    UseHirschberg,
    align_traceback,
    encode_sequence,
    explicit_traceback,
    hirschberg,
    locate_endpoints,
    rescore_alignment,
)
from waveseq.refdp import ref_score, ref_traceback


def _check_global(q, s, scheme, tuning=None):
    cfg = make_cfg("global", scheme.gap_model, "traceback")
    res = hirschberg(q, s, cfg, scheme, tuning)
    want, _ = ref_score(q, s, make_cfg("global", scheme.gap_model), scheme)
    assert res.score == want
    assert rescore_alignment(res, q, s, scheme) == want
    assert (res.q_start, res.q_end, res.s_start, res.s_end) == (0, len(q), 0, len(s))
    return res


def test_hirschberg_matches_reference_randomized():
    rng = np.random.default_rng(2026)
    for trial in range(50):
        q = random_seq(rng, "q", 1, 220)
        s = random_seq(rng, "s", 1, 220)
        for gm in ("linear", "affine"):
            res = _check_global(q, s, scheme_for(gm, trial))
            assert res.cells_computed <= 2 * len(q) * len(s) + 4 * (len(q) + len(s)) + 8


def test_hirschberg_midline_gap_family():
    # a long insertion run crossing many midlines; the bridged subproblems
    # must keep charging extension only
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    for qa, sb in [("A" * 40, "A" * 20), ("A" * 20, "A" * 40),
                   ("A" * 150, "A" * 70), ("ACGT" * 40, "ACGT" * 25)]:
        q = encode_sequence("q", qa)
        s = encode_sequence("s", sb)
        _check_global(q, s, scheme)
        _check_global(q, s, ScoringScheme(2, -1, 2, 2, "linear"))


def test_hirschberg_extreme_shapes():
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    one = encode_sequence("q", "A")
    long = encode_sequence("s", "ACGT" * 50)
    _check_global(one, long, scheme)
    _check_global(long, one, scheme)


def test_explicit_matches_reference_walk():
    rng = np.random.default_rng(5)
    for trial in range(30):
        q = random_seq(rng, "q", 1, 30)
        s = random_seq(rng, "s", 1, 30)
        for at in ("global", "local", "semiglobal"):
            for gm in ("linear", "affine"):
                scheme = scheme_for(gm, trial)
                cfg = make_cfg(at, gm, "traceback")
                assert explicit_traceback(q, s, cfg, scheme) == \
                    ref_traceback(q, s, cfg, scheme)


def test_explicit_size_bound():
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = make_cfg("global", "affine", "traceback")
    q = encode_sequence("q", "A" * T_EXPLICIT)
    s = encode_sequence("s", "C")
    with pytest.raises(UseHirschberg):
        explicit_traceback(q, s, cfg, scheme)


def test_align_traceback_local_semiglobal():
    rng = np.random.default_rng(88)
    for trial in range(40):
        q = random_seq(rng, "q", 1, 160)
        s = random_seq(rng, "s", 1, 160)
        for at in ("local", "semiglobal"):
            for gm in ("linear", "affine"):
                scheme = scheme_for(gm, trial)
                cfg = make_cfg(at, gm, "traceback")
                res = align_traceback(q, s, cfg, scheme)
                want, _ = ref_score(q, s, make_cfg(at, gm), scheme)
                assert res.score == want
                if res.ops:
                    assert rescore_alignment(res, q, s, scheme) == want
                else:
                    assert want == 0
                    assert res.q_start == res.q_end and res.s_start == res.s_end


def test_align_traceback_empty_local():
    q = encode_sequence("q", "TTTT")
    s = encode_sequence("s", "CCCC")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    res = align_traceback(q, s, make_cfg("local", "affine", "traceback"), scheme)
    assert res.score == 0 and res.ops == []


def test_locate_endpoints_window():
    rng = np.random.default_rng(3)
    for trial in range(30):
        q = random_seq(rng, "q", 1, 120)
        s = random_seq(rng, "s", 1, 120)
        for at in ("local", "semiglobal"):
            scheme = scheme_for("affine", trial)
            cfg = make_cfg(at, "affine")
            score, (q0, s0), (q1, s1), cells = locate_endpoints(q, s, cfg, scheme)
            want, end = ref_score(q, s, cfg, scheme)
            assert score == want
            assert 0 <= q0 <= q1 <= len(q)
            assert 0 <= s0 <= s1 <= len(s)
            if at == "local" and score > 0:
                assert (q1, s1) == end


def test_locate_rejects_global():
    q = encode_sequence("q", "ACGT")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    with pytest.raises(ValueError):
        locate_endpoints(q, q, make_cfg("global", "affine"), scheme)


def test_traceback_is_deterministic():
    rng = np.random.default_rng(6)
    q = random_seq(rng, "q", 90, 90)
    s = random_seq(rng, "s", 110, 110)
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = make_cfg("global", "affine", "traceback")
    first = hirschberg(q, s, cfg, scheme)
    for _ in range(3):
        assert hirschberg(q, s, cfg, scheme) == first


def test_allocation_meter_linear_growth():
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = make_cfg("global", "affine", "traceback")
    rng = np.random.default_rng(12)
    peaks = {}
    for size in (128, 256, 512):
        q = random_seq(rng, "q", size, size)
        s = random_seq(rng, "s", size, size)
        meter = AllocationMeter()
        hirschberg(q, s, cfg, scheme, meter=meter)
        assert meter.peak > 0
        peaks[size] = meter.peak
    # quadratic growth would quadruple per doubling; linear at most doubles
    assert peaks[256] <= 3 * peaks[128]
    assert peaks[512] <= 3 * peaks[256]


def test_meter_balances_to_zero():
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = make_cfg("global", "affine", "traceback")
    rng = np.random.default_rng(13)
    q = random_seq(rng, "q", 200, 200)
    s = random_seq(rng, "s", 200, 200)
    meter = AllocationMeter()
    hirschberg(q, s, cfg, scheme, meter=meter)
    assert meter.current == 0
