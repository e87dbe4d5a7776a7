"""Reference DP against the exhaustive path oracle, plus frozen cases."""

import numpy as np
import pytest

from conftest import make_cfg, random_text, scheme_for
from oracles import brute_local, brute_score, brute_semiglobal
from waveseq import ScoringScheme, encode_sequence, rescore_alignment
from waveseq.refdp import fill_matrices, ref_score, ref_traceback


def _seqs(q, s):
    return encode_sequence("q", q), encode_sequence("s", s)


# frozen expectations, derived from the oracles in this directory

def test_global_linear_frozen():
    q, s = _seqs("ACGT", "AGT")
    scheme = ScoringScheme(2, -1, 1, 1, "linear")
    cfg = make_cfg("global", "linear")
    assert ref_score(q, s, cfg, scheme) == (5, (4, 3))
    res = ref_traceback(q, s, make_cfg("global", "linear", "traceback"), scheme)
    assert res.ops == [("M", 1), ("I", 1), ("M", 2)]
    assert res.score == 5
    assert rescore_alignment(res, q, s, scheme) == 5


def test_global_affine_frozen():
    q, s = _seqs("AAAA", "AA")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = make_cfg("global", "affine")
    # two matches minus one affine run of length 2
    assert ref_score(q, s, cfg, scheme) == (1, (4, 2))


def test_semiglobal_frozen():
    q, s = _seqs("ACG", "TTACGTT")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    res = ref_traceback(q, s, make_cfg("semiglobal", "affine", "traceback"), scheme)
    assert res.score == 6
    assert res.ops == [("M", 3)]
    assert (res.q_start, res.q_end) == (0, 3)
    assert (res.s_start, res.s_end) == (2, 5)


def test_local_frozen():
    q, s = _seqs("TTACGTT", "ACG")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    res = ref_traceback(q, s, make_cfg("local", "affine", "traceback"), scheme)
    assert res.score == 6
    assert res.ops == [("M", 3)]
    assert res.q_start == 2


def test_local_all_mismatch_is_empty():
    q, s = _seqs("TTTT", "CCCC")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    res = ref_traceback(q, s, make_cfg("local", "affine", "traceback"), scheme)
    assert res.score == 0
    assert res.ops == []
    assert (res.q_start, res.q_end) == (res.q_start, res.q_start)


def test_global_tie_break_frozen():
    # two co-optimal paths; the walk prefers the diagonal backward, which
    # puts the insertion first in forward order
    q, s = _seqs("AA", "A")
    scheme = ScoringScheme(2, -1, 1, 1, "linear")
    res = ref_traceback(q, s, make_cfg("global", "linear", "traceback"), scheme)
    assert res.score == 1
    assert res.ops == [("I", 1), ("M", 1)]


def test_matches_oracle_randomized():
    rng = np.random.default_rng(20260816)
    checks = 0
    for trial in range(120):
        q = random_text(rng, int(rng.integers(1, 5)))
        s = random_text(rng, int(rng.integers(1, 5)))
        for at in ("global", "local", "semiglobal"):
            for gm in ("linear", "affine"):
                scheme = scheme_for(gm, trial)
                cfg = make_cfg(at, gm)
                want = brute_score(q, s, scheme, at)
                got, end = ref_score(encode_sequence("q", q),
                                     encode_sequence("s", s), cfg, scheme)
                assert got == want, (at, gm, q, s)
                if at == "local" and got > 0:
                    assert end in brute_local(q, s, scheme)[1]
                if at == "semiglobal":
                    assert end in brute_semiglobal(q, s, scheme)[1]
                checks += 1
    assert checks == 120 * 6


def test_traceback_rescores_randomized():
    rng = np.random.default_rng(7)
    for trial in range(60):
        q = encode_sequence("q", random_text(rng, int(rng.integers(1, 40))))
        s = encode_sequence("s", random_text(rng, int(rng.integers(1, 40))))
        for at in ("global", "local", "semiglobal"):
            for gm in ("linear", "affine"):
                scheme = scheme_for(gm, trial)
                cfg = make_cfg(at, gm, "traceback")
                res = ref_traceback(q, s, cfg, scheme)
                want, _ = ref_score(q, s, make_cfg(at, gm), scheme)
                assert res.score == want
                if res.ops:
                    assert rescore_alignment(res, q, s, scheme) == res.score
                else:
                    assert res.score == 0


def test_affine_with_beta_equal_alpha_matches_linear():
    rng = np.random.default_rng(9)
    for _ in range(25):
        q = encode_sequence("q", random_text(rng, int(rng.integers(1, 30))))
        s = encode_sequence("s", random_text(rng, int(rng.integers(1, 30))))
        for at in ("global", "local", "semiglobal"):
            aff = ScoringScheme(2, -1, 2, 2, "affine")
            lin = ScoringScheme(2, -1, 2, 2, "linear")
            sa, ea = ref_score(q, s, make_cfg(at, "affine"), aff)
            sl, el = ref_score(q, s, make_cfg(at, "linear"), lin)
            assert (sa, ea) == (sl, el)


def test_matrix_initialization():
    q, s = _seqs("ACG", "AC")
    scheme = ScoringScheme(2, -1, 3, 1, "affine")
    dp = fill_matrices(q, s, make_cfg("global", "affine"), scheme)
    assert dp.H[0][0] == 0
    assert [dp.H[i][0] for i in range(1, 4)] == [-3, -4, -5]
    assert [dp.H[0][j] for j in range(1, 3)] == [-3, -4]
    # gap matrices open from the matching H edge
    assert dp.E[1][0] == -3 and dp.E[3][0] == -5
    assert dp.F[0][1] == -3 and dp.F[0][2] == -4
    dp_loc = fill_matrices(q, s, make_cfg("local", "affine"), scheme)
    assert dp_loc.H[2][0] == 0 and dp_loc.H[0][2] == 0
    assert min(min(row) for row in dp_loc.H) >= 0
