"""Lane-group wavefront engine: drivers and public entry points.

The compiled kernels in _kernels do the cell work; this module owns array
preparation, kernel selection, and result extraction. All full-matrix score
queries go through engine_score / engine_score_packed; traceback code uses
the last-row capture hooks via _engine_pass.

Kernel selection for affine gaps: the merged-gap-state kernel (4 max + 3
add/sub per cell) is used whenever it provably equals exact two-state Gotoh
for the scheme (merged_state_exact); otherwise the exact kernel (4 max + 4
add/sub) runs. Passes that capture last-row E values always use the exact
kernel because the merged state has no separate vertical component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from ._kernels import NEG32
from .core import (
    AlignConfig,
    ChunkOverflow,
    PackedRangeOverflow,
    ScoringScheme,
    Sequence,
    check_length_bounds,
    gap_cost,
    validate_config,
)

_ATYPE = {"global": 0, "local": 1, "semiglobal": 2}

_ALLOWED_LANES = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class EngineTuning:
    """Lane-group shape: lanes per group and matrix columns per lane."""

    lanes: int = 32
    cols_per_lane: int = 4
    packed: bool = False

    def __post_init__(self):
        if self.lanes not in _ALLOWED_LANES:
            raise ValueError(f"lanes must be one of {_ALLOWED_LANES}, got {self.lanes}")
        if not 1 <= self.cols_per_lane <= 16:
            raise ValueError(f"cols_per_lane must be in 1..16, got {self.cols_per_lane}")

    @property
    def stage_width(self) -> int:
        return self.lanes * self.cols_per_lane


def auto_tuning(max_len: int, packed: bool = False) -> EngineTuning:
    """Pick a stage width that covers typical inputs in few stages.

    Wider stages amortize boundary traffic; beyond the subject length the
    extra columns are padding, so cap the width near max_len.
    """
    p = 32
    k = 1
    while k < 16 and p * k < max_len:
        k *= 2
    return EngineTuning(lanes=p, cols_per_lane=k, packed=packed)


def merged_state_exact(scheme: ScoringScheme) -> bool:
    """True when the merged gap state reproduces exact Gotoh H values.

    Merging E and F into G = max(E, F) can only differ from Gotoh when an
    up-gap feeds a left-gap (or vice versa) through the merged state, i.e.
    on a corner path. A corner of a vertical run a and horizontal run b is
    never strictly better than a diagonal plus one straight run when
    substitution scores are bounded below by the mismatch score and

        match >= mismatch
        gap_open + gap_extend >= -mismatch
        2 * gap_extend >= -mismatch

    all hold (induction on the shorter run length). Linear gaps never use
    the merged kernel so only affine schemes are checked here.
    """
    worst = min(scheme.mismatch_score, scheme.match_score)
    if scheme.match_score < scheme.mismatch_score:
        return False
    if scheme.gap_open + scheme.gap_extend < -worst:
        return False
    if 2 * scheme.gap_extend < -worst:
        return False
    return True


def lane_shift_up(values, fill):
    """Shift lane values one lane upward: lane t receives lane t-1's value."""
    vals = list(values)
    return [fill] + vals[:-1]


def lane_shift_down(values, fill):
    """Shift lane values one lane downward: lane t receives lane t+1's value."""
    vals = list(values)
    return vals[1:] + [fill]


@dataclass
class EngineStats:
    """Counters describing one or more engine passes.

    Block counters are always collected; the per-cell op counters are only
    filled when a pass runs with instrument=True. The *_misaligned counters
    stay zero as long as query and boundary traffic keeps to whole p-row
    blocks.
    """

    query_load_blocks: int = 0
    query_load_misaligned: int = 0
    boundary_load_blocks: int = 0
    boundary_load_misaligned: int = 0
    boundary_store_blocks: int = 0
    boundary_store_misaligned: int = 0
    ops_max: int = 0
    ops_addsub: int = 0
    iterations: int = 0
    cells: int = 0
    stages: int = 0

    def absorb(self, raw: np.ndarray, cells: int, stages: int) -> None:
        self.query_load_blocks += int(raw[K.S_QLOAD])
        self.query_load_misaligned += int(raw[K.S_QLOAD_BAD])
        self.boundary_load_blocks += int(raw[K.S_BLOAD])
        self.boundary_load_misaligned += int(raw[K.S_BLOAD_BAD])
        self.boundary_store_blocks += int(raw[K.S_BSTORE])
        self.boundary_store_misaligned += int(raw[K.S_BSTORE_BAD])
        self.ops_max += int(raw[K.S_OPS_MAX])
        self.ops_addsub += int(raw[K.S_OPS_ADDSUB])
        self.iterations += int(raw[K.S_ITER])
        self.cells += cells
        self.stages += stages

    @property
    def ops_total(self) -> int:
        return self.ops_max + self.ops_addsub


@dataclass(frozen=True)
class ScoringProfile:
    """Substitution scores for one subject chunk, one column per position.

    table has one row per query symbol A,C,G,T and profile.width columns;
    columns past chunk_len are padding and score as mismatches. Flagged
    (ambiguous) query symbols are handled by the engine with an implicit
    all-mismatch row.
    """

    table: np.ndarray
    chunk_len: int
    width: int


def build_scoring_profile(chunk: Sequence, scheme: ScoringScheme,
                          tuning: EngineTuning) -> ScoringProfile:
    """Profile for one subject chunk of at most tuning.stage_width symbols."""
    w = tuning.stage_width
    n = len(chunk)
    if n > w:
        raise ChunkOverflow(f"chunk of {n} symbols exceeds stage width {w}")
    full = np.empty((5, w), np.int32)
    K.build_profile5(chunk.codes, chunk.flags, 0, w,
                     scheme.match_score, scheme.mismatch_score, full)
    return ScoringProfile(table=full[:4].copy(), chunk_len=n, width=w)


@dataclass
class StageBoundary:
    """Column of carries handed from one stage to the next.

    h[r] is H at the stage's rightmost column for matrix row r. gap[r] is
    the kernel's horizontal gap carry for that cell (None for linear gaps;
    the merged kernel stores G, the exact kernel stores F - gap_extend).
    Rows beyond the query length are padding.
    """

    h: np.ndarray
    gap: np.ndarray | None = None


@dataclass
class StageOutputs:
    """Observability data from a single wavefront stage."""

    running_max: tuple[int, int, int]
    h_last: int
    col_h: np.ndarray | None
    col_gap: np.ndarray | None
    iterations: int
    cells: int


def _encode_q5(query: Sequence, p: int) -> np.ndarray:
    m = len(query)
    q5 = np.full(m + 2 * p + 2, 4, np.uint8)
    q5[:m] = np.where(query.flags, np.uint8(4), query.codes)
    return q5


def _left_column_h(m: int, p: int, scheme: ScoringScheme, top_global: bool,
                   preopened: bool = False) -> np.ndarray:
    b = np.full(m + 2 * p + 2, NEG32, np.int32)
    b[0] = 0
    if top_global:
        alpha = scheme.gap_open
        beta = scheme.gap_extend if scheme.gap_model == "affine" else scheme.gap_open
        if preopened:
            # a vertical gap entered this column from above: extension only
            for i in range(1, m + 1):
                b[i] = -beta * i
        else:
            for i in range(1, m + 1):
                b[i] = -(alpha + beta * (i - 1))
    else:
        b[1:m + 1] = 0
    return b


def _gap_column(m: int, p: int) -> np.ndarray:
    return np.full(m + 2 * p + 2, NEG32, np.int32)


def _seed_best(cfg: AlignConfig, n: int, scheme: ScoringScheme,
               anchored: bool) -> np.ndarray:
    best = np.zeros(3, np.int64)
    if cfg.align_type == "semiglobal":
        best[2] = n
        if anchored:
            # the (0, n) candidate is a deletion run from the pinned corner
            best[0] = -gap_cost(scheme, n)
    return best


@dataclass
class PassResult:
    score: int
    end: tuple[int, int]
    cells: int
    stages: int
    row_h: np.ndarray | None = None
    row_e: np.ndarray | None = None
    col_h: np.ndarray | None = None
    col_gap: np.ndarray | None = None


def _engine_pass(query: Sequence, subject: Sequence, cfg: AlignConfig,
                 scheme: ScoringScheme, tuning: EngineTuning, *,
                 capture_last_row: bool = False,
                 capture_col_n: bool = False,
                 left_preopened: bool = False,
                 anchored: bool = False,
                 instrument: bool = False,
                 stats: EngineStats | None = None,
                 meter=None) -> PassResult:
    """One full forward sweep over the matrix. cfg must be normalized.

    left_preopened treats the left init column as a vertical gap entered
    from above (extension cost only); global alignments only. anchored pins
    the path start to cell (0, 0) with global-style edge inits while keeping
    the align type's end-cell rule; local additionally drops the zero floor
    so suffix scores stay exact. Both serve the traceback module.
    """
    m, n = len(query), len(subject)
    p, k = tuning.lanes, tuning.cols_per_lane
    atype = _ATYPE[cfg.align_type]
    top_global = atype == 0 or anchored
    alpha, beta = scheme.gap_open, scheme.gap_extend
    beta_eff = beta if scheme.gap_model == "affine" else alpha
    match, mism = scheme.match_score, scheme.mismatch_score

    if m == 0 or n == 0:
        if atype == 0:
            score, end = -gap_cost(scheme, n if m == 0 else m), (m, n)
        elif atype == 1:
            score, end = 0, (0, 0)
        else:
            score, end = 0, ((0, n) if m == 0 else (0, 0))
        return PassResult(score=score, end=end, cells=0, stages=0)

    katype = 3 if (anchored and atype == 1) else atype

    q5 = _encode_q5(query, p)
    raw = np.zeros(K.N_STATS, np.int64)
    best = _seed_best(cfg, n, scheme, anchored)
    cap = np.zeros(1, np.int64)
    H = np.empty((p, k), np.int32)
    prof = np.empty((5, p * k), np.int32)
    dummy32 = np.zeros(1, np.int32)

    if capture_last_row:
        row_h = np.full(n + 2, NEG32, np.int32)
        row_e = np.full(n + 2, NEG32, np.int32)
        if left_preopened:
            row_h[0] = -beta_eff * m
        elif top_global:
            row_h[0] = -(alpha + beta_eff * (m - 1))
        else:
            row_h[0] = 0
        # the only path into E(m, 0) is the left-column run itself
        row_e[0] = -beta_eff * m if left_preopened else -(alpha + beta_eff * (m - 1))
    else:
        row_h = row_e = dummy32
    if capture_col_n:
        col_h = np.full(m + 2, NEG32, np.int32)
        col_h[0] = -(alpha + beta_eff * (n - 1)) if top_global else 0
        col_gap = np.full(m + 2, NEG32, np.int32)
    else:
        col_h = col_gap = dummy32

    bh_a = _left_column_h(m, p, scheme, top_global, preopened=left_preopened)
    bh_b = np.full(m + 2 * p + 2, NEG32, np.int32)

    aux = q5.nbytes + bh_a.nbytes + bh_b.nbytes + H.nbytes + prof.nbytes
    cap_bytes = 0
    if capture_last_row:
        cap_bytes += row_h.nbytes + row_e.nbytes
    if capture_col_n:
        cap_bytes += col_h.nbytes + col_gap.nbytes

    if scheme.gap_model == "linear":
        if meter is not None:
            meter.add(aux + cap_bytes)
        stages = K.run_linear32(q5, m, subject.codes, subject.flags, n, p, k,
                                match, mism, alpha, katype, top_global,
                                bh_a, bh_b, H, prof,
                                best, cap, row_h, capture_last_row,
                                col_h, capture_col_n, raw, instrument)
    else:
        bg_a = _gap_column(m, p)
        bg_b = np.full(m + 2 * p + 2, NEG32, np.int32)
        aux += bg_a.nbytes + bg_b.nbytes
        use_exact = capture_last_row or not merged_state_exact(scheme)
        if use_exact:
            Ep = np.empty((p, k), np.int32)
            A = np.empty((p, k), np.int32)
            aux += Ep.nbytes + A.nbytes
            if meter is not None:
                meter.add(aux + cap_bytes)
            stages = K.run_exact32(q5, m, subject.codes, subject.flags, n, p, k,
                                   match, mism, alpha, beta, katype, top_global,
                                   bh_a, bg_a, bh_b, bg_b, H, Ep, A, prof,
                                   best, cap, row_h, row_e, capture_last_row,
                                   col_h, col_gap, capture_col_n, raw, instrument)
        else:
            G = np.empty((p, k), np.int32)
            aux += G.nbytes
            if meter is not None:
                meter.add(aux + cap_bytes)
            stages = K.run_merged32(q5, m, subject.codes, subject.flags, n, p, k,
                                    match, mism, alpha, beta, katype, top_global,
                                    bh_a, bg_a, bh_b, bg_b, H, G, prof,
                                    best, cap, row_h, capture_last_row,
                                    col_h, col_gap, capture_col_n, raw, instrument)

    if meter is not None:
        meter.sub(aux)

    cells = m * n
    if stats is not None:
        stats.absorb(raw, cells, stages)

    if atype == 0:
        score, end = int(cap[0]), (m, n)
    else:
        score, end = int(best[0]), (int(best[1]), int(best[2]))
    return PassResult(score=score, end=end, cells=cells, stages=stages,
                      row_h=row_h if capture_last_row else None,
                      row_e=row_e if capture_last_row else None,
                      col_h=col_h if capture_col_n else None,
                      col_gap=col_gap if capture_col_n else None)


def engine_score(query: Sequence, subject: Sequence, cfg: AlignConfig,
                 scheme: ScoringScheme, tuning: EngineTuning | None = None,
                 stats: EngineStats | None = None,
                 instrument: bool = False) -> tuple[int, tuple[int, int], int]:
    """Best score per cfg plus its end cell and the count of computed cells.

    For global alignments the end cell is always (len(query), len(subject));
    for local and semiglobal it is the argmax cell with ties broken toward
    the smallest query then subject coordinate.
    """
    cfg = validate_config(cfg, scheme)
    m, n = len(query), len(subject)
    check_length_bounds(m, n, scheme)
    if tuning is None:
        tuning = auto_tuning(max(m, n))
    res = _engine_pass(query, subject, cfg, scheme, tuning,
                       stats=stats, instrument=instrument)
    return res.score, res.end, res.cells


def wavefront_stage(query: Sequence, profile: ScoringProfile, cfg: AlignConfig,
                    scheme: ScoringScheme, boundary_in: StageBoundary | None,
                    stage_index: int, tuning: EngineTuning,
                    n_total: int | None = None,
                    stats: EngineStats | None = None,
                    instrument: bool = False) -> tuple[StageBoundary, StageOutputs]:
    """Run one stage of p*k columns and return its outgoing boundary.

    boundary_in is the previous stage's output, or None for stage 0 (the
    left init column is synthesized). n_total is the full subject length
    for end-cell bookkeeping; it defaults to the last column of this stage's
    chunk, which is correct when this is the final stage.

    The outgoing boundary's h column is also captured here: col_h[r] holds
    H at this stage's last true column for every row r, so a single-stage
    run exposes the full column H(r, n).
    """
    cfg = validate_config(cfg, scheme)
    m = len(query)
    p, k = tuning.lanes, tuning.cols_per_lane
    w = p * k
    if profile.width != w:
        raise ChunkOverflow(
            f"profile width {profile.width} does not match stage width {w}")
    col0 = stage_index * w
    if n_total is None:
        n_total = col0 + profile.chunk_len
    check_length_bounds(m, n_total, scheme)
    atype = _ATYPE[cfg.align_type]
    top_global = atype == 0
    alpha, beta = scheme.gap_open, scheme.gap_extend

    prof = np.empty((5, w), np.int32)
    prof[:4] = profile.table
    prof[4] = scheme.mismatch_score

    q5 = _encode_q5(query, p)
    L = m + 2 * p + 2
    if boundary_in is None:
        if stage_index != 0:
            raise ValueError("only stage 0 may start without a boundary")
        bh = _left_column_h(m, p, scheme, top_global)
        bg = _gap_column(m, p)
    else:
        bh = np.full(L, NEG32, np.int32)
        bh[:min(L, boundary_in.h.shape[0])] = boundary_in.h[:L]
        bg = np.full(L, NEG32, np.int32)
        if boundary_in.gap is not None:
            bg[:min(L, boundary_in.gap.shape[0])] = boundary_in.gap[:L]
    bh_out = np.full(L, NEG32, np.int32)
    bg_out = np.full(L, NEG32, np.int32)

    raw = np.zeros(K.N_STATS, np.int64)
    best = np.array([NEG32, -1, -1], np.int64)
    cap = np.zeros(1, np.int64)
    H = np.empty((p, k), np.int32)
    dummy32 = np.zeros(1, np.int32)
    col_h = np.full(m + 2, NEG32, np.int32)
    col_h[0] = -(alpha + (beta if scheme.gap_model == "affine" else alpha)
                 * (n_total - 1)) if top_global and n_total >= 1 else 0
    col_gap = np.full(m + 2, NEG32, np.int32)

    chunk = profile.chunk_len
    if scheme.gap_model == "linear":
        K.stage_linear32(q5, m, prof, col0, chunk, n_total, p, k, alpha, alpha,
                         atype, top_global, bh, bh_out, H,
                         best, cap, dummy32, False, col_h, True, raw, instrument)
        bound = StageBoundary(h=bh_out, gap=None)
        out_gap = None
    elif merged_state_exact(scheme):
        G = np.empty((p, k), np.int32)
        K.stage_merged32(q5, m, prof, col0, chunk, n_total, p, k, alpha, beta,
                         atype, top_global, bh, bg, bh_out, bg_out, H, G,
                         best, cap, dummy32, False, col_h, col_gap, True,
                         raw, instrument)
        bound = StageBoundary(h=bh_out, gap=bg_out)
        out_gap = col_gap
    else:
        Ep = np.empty((p, k), np.int32)
        A = np.empty((p, k), np.int32)
        K.stage_exact32(q5, m, prof, col0, chunk, n_total, p, k, alpha, beta,
                        atype, top_global, bh, bg, bh_out, bg_out, H, Ep, A,
                        best, cap, dummy32, dummy32, False, col_h, col_gap, True,
                        raw, instrument)
        bound = StageBoundary(h=bh_out, gap=bg_out)
        out_gap = col_gap

    cells = m * chunk
    if stats is not None:
        stats.absorb(raw, cells, 1)
    outputs = StageOutputs(
        running_max=(int(best[0]), int(best[1]), int(best[2])),
        h_last=int(cap[0]),
        col_h=col_h,
        col_gap=out_gap,
        iterations=int(raw[K.S_ITER]),
        cells=cells,
    )
    return bound, outputs


_PACK_LIMIT = 1 << 14


def packed_range_ok(scheme: ScoringScheme, m: int, n: int) -> bool:
    """True when every finite score of an m x n problem fits 16-bit halves."""
    return scheme.max_step * (m + n) < _PACK_LIMIT


def engine_score_packed(pair_a: tuple[Sequence, Sequence],
                        pair_b: tuple[Sequence, Sequence],
                        cfg: AlignConfig, scheme: ScoringScheme,
                        tuning: EngineTuning | None = None,
                        stats: EngineStats | None = None,
                        instrument: bool = False):
    """Score two alignment problems in one pass over packed 16-bit pairs.

    Returns ((score_a, end_a), (score_b, end_b), cells). Raises
    PackedRangeOverflow when either problem could leave the int16 value
    range, and ValueError for affine schemes the merged gap state cannot
    represent exactly.
    """
    cfg = validate_config(cfg, scheme)
    qa, sa = pair_a
    qb, sb = pair_b
    ma, na = len(qa), len(sa)
    mb, nb = len(qb), len(sb)
    for (m_h, n_h) in ((ma, na), (mb, nb)):
        if not packed_range_ok(scheme, m_h, n_h):
            raise PackedRangeOverflow(
                f"problem of size {m_h}x{n_h} exceeds the packed 16-bit range "
                f"(max |score| step {scheme.max_step})")
    if scheme.gap_model == "affine" and not merged_state_exact(scheme):
        raise ValueError("packed affine mode requires a merged-state-exact scheme")

    mm, nn = max(ma, mb), max(na, nb)
    if tuning is None:
        tuning = auto_tuning(max(mm, nn), packed=True)
    p, k = tuning.lanes, tuning.cols_per_lane
    atype = _ATYPE[cfg.align_type]
    top_global = atype == 0
    alpha, beta = scheme.gap_open, scheme.gap_extend
    match, mism = scheme.match_score, scheme.mismatch_score

    L = mm + 2 * p + 2
    q5 = np.full((2, L), 4, np.uint8)
    q5[0, :ma] = np.where(qa.flags, np.uint8(4), qa.codes)
    q5[1, :mb] = np.where(qb.flags, np.uint8(4), qb.codes)
    mh = np.array([ma, mb], np.int64)
    nh = np.array([na, nb], np.int64)

    bh_a = np.full((L, 2), K.NEG16, np.int16)
    bh_b = np.full((L, 2), K.NEG16, np.int16)
    beta_init = beta if scheme.gap_model == "affine" else alpha
    for hf, m_h in ((0, ma), (1, mb)):
        bh_a[0, hf] = 0
        if top_global:
            for i in range(1, m_h + 1):
                bh_a[i, hf] = -(alpha + beta_init * (i - 1))
        else:
            bh_a[1:m_h + 1, hf] = 0

    raw = np.zeros(K.N_STATS, np.int64)
    best = np.zeros((2, 3), np.int64)
    if cfg.align_type == "semiglobal":
        best[0, 2] = na
        best[1, 2] = nb
    cap = np.zeros(2, np.int64)
    H = np.empty((p, k, 2), np.int16)
    prof = np.empty((2, 5, p * k), np.int16)

    if scheme.gap_model == "linear":
        stages = K.run_linear16(q5, mm, mh, sa.codes, sa.flags, sb.codes, sb.flags,
                                nn, nh, p, k, match, mism, alpha, atype, top_global,
                                bh_a, bh_b, H, prof, best, cap, raw, instrument)
    else:
        bg_a = np.full((L, 2), K.NEG16, np.int16)
        bg_b = np.full((L, 2), K.NEG16, np.int16)
        G = np.empty((p, k, 2), np.int16)
        stages = K.run_merged16(q5, mm, mh, sa.codes, sa.flags, sb.codes, sb.flags,
                                nn, nh, p, k, match, mism, alpha, beta, atype,
                                top_global, bh_a, bg_a, bh_b, bg_b, H, G, prof,
                                best, cap, raw, instrument)

    cells = ma * na + mb * nb
    if stats is not None:
        stats.absorb(raw, cells, stages)

    if atype == 0:
        out_a = (int(cap[0]), (ma, na))
        out_b = (int(cap[1]), (mb, nb))
    else:
        out_a = (int(best[0, 0]), (int(best[0, 1]), int(best[0, 2])))
        out_b = (int(best[1, 0]), (int(best[1, 1]), int(best[1, 2])))
    return out_a, out_b, cells
