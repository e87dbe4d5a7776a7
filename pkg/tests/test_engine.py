"""Lane-group engine against the reference DP."""

import numpy as np
import pytest

from conftest import make_cfg, random_seq, scheme_for
from waveseq import (
    AlignConfig,
    ChunkOverflow,
    EngineStats,
    EngineTuning,
    PackedRangeOverflow,
    ScoringScheme,
    StageBoundary,
    auto_tuning,
    build_scoring_profile,
    encode_sequence,
    engine_score,
    engine_score_packed,
    lane_shift_down,
    lane_shift_up,
    merged_state_exact,
    packed_range_ok,
    validate_config,
    wavefront_stage,
)
from waveseq.refdp import fill_matrices, ref_score

NEG32 = -(2 ** 30)


def test_tuning_validation():
    with pytest.raises(ValueError):
        EngineTuning(lanes=5)
    with pytest.raises(ValueError):
        EngineTuning(lanes=8, cols_per_lane=0)
    assert EngineTuning(lanes=8, cols_per_lane=4).stage_width == 32


def test_auto_tuning_tracks_length():
    assert auto_tuning(10).stage_width >= 10
    assert auto_tuning(2000).cols_per_lane <= 16
    assert auto_tuning(100, packed=True).packed


def test_lane_shifts():
    assert lane_shift_up([1, 2, 3], 0) == [0, 1, 2]
    assert lane_shift_down([1, 2, 3], 9) == [2, 3, 9]


def test_scoring_profile_values_and_padding():
    scheme = ScoringScheme(3, -2, 2, 1, "affine")
    tun = EngineTuning(lanes=4, cols_per_lane=1)
    chunk = encode_sequence("s", "ACN")
    prof = build_scoring_profile(chunk, scheme, tun)
    assert prof.chunk_len == 3 and prof.width == 4
    # row c holds sigma(c, chunk[j]); the flagged N and the padding column
    # score as mismatches for every query symbol
    assert prof.table[0].tolist() == [3, -2, -2, -2]
    assert prof.table[1].tolist() == [-2, 3, -2, -2]
    assert prof.table[2].tolist() == [-2, -2, -2, -2]
    with pytest.raises(ChunkOverflow):
        build_scoring_profile(encode_sequence("s", "ACGTA"), scheme, tun)


def test_merged_state_guard():
    assert merged_state_exact(ScoringScheme(2, -1, 2, 1, "affine"))
    # a gap cheaper than the worst substitution breaks the merged shortcut
    assert not merged_state_exact(ScoringScheme(2, -9, 2, 1, "affine"))


def test_matches_reference_randomized():
    rng = np.random.default_rng(101)
    tunings = [EngineTuning(lanes=p, cols_per_lane=k)
               for p in (4, 8, 16, 32) for k in (1, 2, 4)]
    for trial in range(150):
        q = random_seq(rng, "q", 1, 120)
        s = random_seq(rng, "s", 1, 120)
        tun = tunings[trial % len(tunings)]
        for at in ("global", "local", "semiglobal"):
            for gm in ("linear", "affine"):
                scheme = scheme_for(gm, trial)
                cfg = make_cfg(at, gm)
                want = ref_score(q, s, cfg, scheme)
                got_score, got_end, cells = engine_score(q, s, cfg, scheme, tun)
                assert (got_score, got_end) == want, (at, gm, tun)
                assert cells == len(q) * len(s)


def test_exact_kernel_handles_non_merged_schemes():
    rng = np.random.default_rng(55)
    scheme = ScoringScheme(2, -9, 2, 1, "affine")
    for _ in range(40):
        q = random_seq(rng, "q", 1, 80)
        s = random_seq(rng, "s", 1, 80)
        for at in ("global", "local", "semiglobal"):
            cfg = make_cfg(at, "affine")
            assert engine_score(q, s, cfg, scheme)[:2] == ref_score(q, s, cfg, scheme)


def test_stage_chaining_reproduces_reference_column():
    rng = np.random.default_rng(77)
    for trial in range(40):
        q = random_seq(rng, "q", 1, 50)
        s = random_seq(rng, "s", 10, 90)
        m, n = len(q), len(s)
        gm = ("linear", "affine")[trial % 2]
        at = ("global", "local", "semiglobal")[trial % 3]
        scheme = (ScoringScheme(2, -1, 1, 1, "linear") if gm == "linear"
                  else ScoringScheme(2, -1, 2, 1, "affine"))
        cfg = validate_config(make_cfg(at, gm), scheme)
        tun = EngineTuning(lanes=4, cols_per_lane=(1, 2)[trial % 2])
        w = tun.stage_width
        nstages = (n + w - 1) // w
        boundary = None
        best = None
        last_col = None
        for sidx in range(nstages):
            chunk = s.window(sidx * w, min((sidx + 1) * w, n))
            prof = build_scoring_profile(chunk, scheme, tun)
            boundary, outs = wavefront_stage(q, prof, cfg, scheme, boundary,
                                             sidx, tun, n_total=n)
            if sidx == nstages - 1:
                last_col = outs.col_h
            cand = outs.running_max
            if cand[0] > NEG32 // 2:
                if (best is None or cand[0] > best[0]
                        or (cand[0] == best[0] and cand[1:] < best[1:])):
                    best = cand
        H = fill_matrices(q, s, cfg, scheme).H
        assert [int(last_col[r]) for r in range(1, m + 1)] == \
            [H[r][n] for r in range(1, m + 1)]
        want, _ = ref_score(q, s, cfg, scheme)
        if at == "global":
            assert int(last_col[m]) == want
        else:
            assert best is not None and best[0] == want


def test_stage_zero_rejects_missing_boundary_only_later():
    q = encode_sequence("q", "ACGT")
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    cfg = validate_config(make_cfg("global", "affine"), scheme)
    tun = EngineTuning(lanes=4, cols_per_lane=1)
    prof = build_scoring_profile(encode_sequence("s", "ACGT"), scheme, tun)
    with pytest.raises(ValueError):
        wavefront_stage(q, prof, cfg, scheme, None, 1, tun)


def test_packed_matches_unpacked():
    rng = np.random.default_rng(31)
    for trial in range(60):
        qa = random_seq(rng, "qa", 1, 60)
        sa = random_seq(rng, "sa", 1, 60)
        qb = random_seq(rng, "qb", 1, 60)
        sb = random_seq(rng, "sb", 1, 60)
        gm = ("linear", "affine")[trial % 2]
        at = ("global", "local", "semiglobal")[trial % 3]
        scheme = (ScoringScheme(2, -1, 2, 2, "linear") if gm == "linear"
                  else ScoringScheme(2, -1, 2, 1, "affine"))
        cfg = make_cfg(at, gm)
        tun = EngineTuning(lanes=(4, 8, 16)[trial % 3],
                           cols_per_lane=(1, 2, 4)[trial % 3], packed=True)
        out_a, out_b, cells = engine_score_packed((qa, sa), (qb, sb),
                                                  cfg, scheme, tun)
        assert out_a == ref_score(qa, sa, cfg, scheme)
        assert out_b == ref_score(qb, sb, cfg, scheme)
        assert cells == len(qa) * len(sa) + len(qb) * len(sb)


def test_packed_range_overflow():
    big = ScoringScheme(20000, -20000, 20000, 20000, "affine")
    assert not packed_range_ok(big, 2, 2)
    q = encode_sequence("q", "AC")
    s = encode_sequence("s", "AC")
    with pytest.raises(PackedRangeOverflow):
        engine_score_packed((q, s), (q, s), make_cfg("global", "affine"), big)


def test_packed_rejects_non_merged_affine():
    scheme = ScoringScheme(2, -9, 2, 1, "affine")
    q = encode_sequence("q", "ACGT")
    with pytest.raises(ValueError):
        engine_score_packed((q, q), (q, q), make_cfg("global", "affine"), scheme)


def _counter_expectations(m, n, p, k):
    w = p * k
    stages = -(-n // w)
    iters = stages * (m + p)
    qload = stages * (-(-(m + p) // p))
    # one preload plus a reload at every p-multiple iteration boundary
    bload = stages * (1 + (m + p) // p)
    flushes = sum(1 for r in range(1, m + 1) if r % p == p - 1 or r == m)
    return stages, iters, qload, bload, stages * flushes


@pytest.mark.parametrize("m,n,p,k", [(10, 10, 4, 2), (37, 53, 8, 2),
                                     (100, 300, 32, 4), (5, 3, 4, 1),
                                     (64, 64, 16, 4)])
def test_block_access_discipline(m, n, p, k):
    rng = np.random.default_rng(m * 1000 + n)
    q = random_seq(rng, "q", m, m)
    s = random_seq(rng, "s", n, n)
    tun = EngineTuning(lanes=p, cols_per_lane=k)
    stages, iters, qload, bload, bstore = _counter_expectations(m, n, p, k)
    for at in ("global", "local", "semiglobal"):
        for scheme in (ScoringScheme(2, -1, 2, 1, "affine"),
                       ScoringScheme(2, -1, 2, 2, "linear")):
            st = EngineStats()
            engine_score(q, s, make_cfg(at, scheme.gap_model), scheme, tun,
                         stats=st, instrument=True)
            assert st.query_load_misaligned == 0
            assert st.boundary_load_misaligned == 0
            assert st.boundary_store_misaligned == 0
            assert st.stages == stages
            assert st.iterations == iters
            assert st.query_load_blocks == qload
            assert st.boundary_load_blocks == bload
            assert st.boundary_store_blocks == bstore


def test_ops_per_cell_update():
    # the merged affine kernel runs 4 max + 3 add/sub per executed cell
    # update; the lockstep loop executes stages*m*w of them (padding
    # included), and with n == stage width nothing is padding
    rng = np.random.default_rng(4)
    q = random_seq(rng, "q", 64, 64)
    s = random_seq(rng, "s", 64, 64)
    tun = EngineTuning(lanes=16, cols_per_lane=4)
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    st = EngineStats()
    engine_score(q, s, make_cfg("global", "affine"), scheme, tun,
                 stats=st, instrument=True)
    updates = st.stages * 64 * tun.stage_width
    assert updates == 64 * 64
    assert st.ops_max == 4 * updates
    assert st.ops_addsub == 3 * updates
    assert st.ops_total == 7 * updates

    st = EngineStats()
    lin = ScoringScheme(2, -1, 2, 2, "linear")
    engine_score(q, s, make_cfg("global", "linear"), lin, tun,
                 stats=st, instrument=True)
    assert st.ops_total == 5 * updates


def test_stats_absorb_accumulates():
    rng = np.random.default_rng(8)
    q = random_seq(rng, "q", 20, 20)
    s = random_seq(rng, "s", 20, 20)
    scheme = ScoringScheme(2, -1, 2, 1, "affine")
    st = EngineStats()
    engine_score(q, s, make_cfg("global", "affine"), scheme, stats=st)
    one = st.cells
    engine_score(q, s, make_cfg("global", "affine"), scheme, stats=st)
    assert st.cells == 2 * one
