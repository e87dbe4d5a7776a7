"""Traceback construction in linear memory.

Global tracebacks use divide and conquer on the query: two score-only
engine sweeps locate where an optimal path crosses the middle query row,
the problem splits there, and only last-row score vectors are ever held.
With affine gaps the path may cross the midline inside a vertical gap run,
so the split also considers joining the forward and reverse E states; that
join double-charges one gap open, refunded as +(gap_open - gap_extend),
and pins the two query rows around the midline to an explicit I-I bridge.
The subproblems beside a bridge carry a pre-opened-gap mark so the run's
remainder is charged extension only; without the mark their free optimum
can beat the constrained path and the pieces no longer add up.

Local and semiglobal tracebacks first locate the alignment window: a
forward sweep finds the end cell, then a sweep over the reversed end-cell
prefixes, anchored to start at the end cell, finds the start. The window's
global optimum then provably equals the located score.

Total cells touched stay under 2x the matrix area and peak working memory
stays linear in m+n.
"""

from __future__ import annotations

from .core import (
    NEG_INF,
    AlignConfig,
    AlignmentResult,
    ScoringScheme,
    Sequence,
    UseHirschberg,
    WaveseqError,
    check_length_bounds,
    gap_cost,
    merge_ops,
    validate_config,
)
from .engine import EngineStats, EngineTuning, _engine_pass, auto_tuning
from .refdp import ref_traceback

T_EXPLICIT = 128


class AllocationMeter:
    """Byte counter for working memory, tracking current and peak totals.

    Engine sweeps and traceback buffers report their numpy allocations
    here; small-case DP tables are accounted at 4 bytes per cell per table.
    Constant-size Python overhead is not modeled.
    """

    def __init__(self):
        self.current = 0
        self.peak = 0

    def add(self, nbytes: int) -> None:
        self.current += nbytes
        if self.current > self.peak:
            self.peak = self.current

    def sub(self, nbytes: int) -> None:
        self.current -= nbytes


def _walk(query: Sequence, subject: Sequence, cfg: AlignConfig,
          scheme: ScoringScheme, meter: AllocationMeter | None) -> AlignmentResult:
    if meter is not None:
        tables = 1 if scheme.gap_model == "linear" else 3
        est = tables * (len(query) + 1) * (len(subject) + 1) * 4
        meter.add(est)
        try:
            return ref_traceback(query, subject, cfg, scheme)
        finally:
            meter.sub(est)
    return ref_traceback(query, subject, cfg, scheme)


def explicit_traceback(query: Sequence, subject: Sequence, cfg: AlignConfig,
                       scheme: ScoringScheme,
                       meter: AllocationMeter | None = None) -> AlignmentResult:
    """Full-matrix traceback for small problems.

    Raises UseHirschberg when m+n exceeds T_EXPLICIT; larger problems must
    go through the linear-memory path.
    """
    cfg = validate_config(cfg, scheme)
    m, n = len(query), len(subject)
    if m + n > T_EXPLICIT:
        raise UseHirschberg(
            f"m+n = {m + n} exceeds the explicit traceback bound {T_EXPLICIT}")
    return _walk(query, subject, cfg, scheme, meter)


def _explicit_global(q: Sequence, s: Sequence, scheme: ScoringScheme,
                     gap_in: bool, gap_out: bool,
                     meter: AllocationMeter | None):
    """Global walk for divide-and-conquer base cases, with boundary gaps.

    gap_in: a vertical gap run enters the top-left corner from above, so
    insertions down the left column cost extension only. gap_out: the run
    continues below the bottom-right corner, so a trailing insertion run in
    the last column is refunded one open-minus-extend. Both arise only from
    the affine midline bridge. Returns (ops, cells, score) where score uses
    these boundary semantics.
    """
    m, n = len(q), len(s)
    alpha = scheme.gap_open
    affine = scheme.gap_model == "affine"
    beta = scheme.gap_extend if affine else alpha
    est = 3 * (m + 1) * (n + 1) * 4
    if meter is not None:
        meter.add(est)

    H = [[0] * (n + 1) for _ in range(m + 1)]
    E = [[NEG_INF] * (n + 1) for _ in range(m + 1)]
    F = [[NEG_INF] * (n + 1) for _ in range(m + 1)]
    for j in range(1, n + 1):
        H[0][j] = -(alpha + beta * (j - 1))
    for i in range(1, m + 1):
        H[i][0] = -beta * i if gap_in else -(alpha + beta * (i - 1))

    qrow = [4 if f else int(c) for c, f in zip(q.codes.tolist(), q.flags.tolist())]
    sc = s.codes.tolist()
    sf = s.flags.tolist()
    match, mism = scheme.match_score, scheme.mismatch_score

    for i in range(1, m + 1):
        qi = qrow[i - 1]
        row, up = H[i], H[i - 1]
        erow, eup = E[i], E[i - 1]
        frow = F[i]
        h_diag = up[0]
        h_left = row[0]
        f_left = NEG_INF
        for j in range(1, n + 1):
            e = eup[j] - beta
            t = up[j] - alpha
            if t > e:
                e = t
            f = f_left - beta
            t = h_left - alpha
            if t > f:
                f = t
            sub = mism if (qi == 4 or sf[j - 1] or sc[j - 1] != qi) else match
            h = h_diag + sub
            if e > h:
                h = e
            if f > h:
                h = f
            h_diag = up[j]
            erow[j] = e
            frow[j] = f
            row[j] = h
            h_left = h
            f_left = f

    score = H[m][n]
    state = "H"
    if gap_out and E[m][n] + (alpha - beta) > score:
        score = E[m][n] + (alpha - beta)
        state = "E"

    i, j = m, n
    ops_rev: list[tuple[str, int]] = []
    while i > 0 or j > 0:
        if state == "E":
            ops_rev.append(("I", 1))
            ext = E[i][j] == E[i - 1][j] - beta
            i -= 1
            if not ext:
                state = "H"
            continue
        if state == "F":
            ops_rev.append(("D", 1))
            ext = F[i][j] == F[i][j - 1] - beta
            j -= 1
            if not ext:
                state = "H"
            continue
        if i == 0:
            ops_rev.append(("D", j))
            j = 0
            continue
        if j == 0:
            ops_rev.append(("I", i))
            i = 0
            continue
        qi = qrow[i - 1]
        sub = mism if (qi == 4 or sf[j - 1] or sc[j - 1] != qi) else match
        if H[i][j] == H[i - 1][j - 1] + sub:
            ops_rev.append(("M", 1))
            i -= 1
            j -= 1
            continue
        if H[i][j] == E[i][j]:
            state = "E"
            continue
        if H[i][j] == F[i][j]:
            state = "F"
            continue
        raise WaveseqError(f"internal: no predecessor reproduces H[{i}][{j}]")

    if meter is not None:
        meter.sub(est)
    return list(reversed(ops_rev)), m * n, score


def hirschberg(query: Sequence, subject: Sequence, cfg: AlignConfig,
               scheme: ScoringScheme, tuning: EngineTuning | None = None,
               meter: AllocationMeter | None = None,
               stats: EngineStats | None = None) -> AlignmentResult:
    """Global traceback in linear memory."""
    cfg = validate_config(cfg, scheme)
    if cfg.align_type != "global":
        raise ValueError("hirschberg builds global tracebacks; "
                         "use align_traceback for local or semiglobal")
    m, n = len(query), len(subject)
    check_length_bounds(m, n, scheme)
    if tuning is None:
        tuning = auto_tuning(max(m, n))
    ops, cells, score = _hirsch(query, subject, cfg, scheme, tuning, meter, stats,
                                False, False)
    return AlignmentResult(score=score, q_start=0, q_end=m, s_start=0, s_end=n,
                           ops=merge_ops(ops), cells_computed=cells)


def _hirsch(q: Sequence, s: Sequence, cfg: AlignConfig, scheme: ScoringScheme,
            tuning: EngineTuning, meter: AllocationMeter | None,
            stats: EngineStats | None, gap_in: bool, gap_out: bool):
    """Divide-and-conquer core. Returns (ops, cells, score).

    gap_in / gap_out mark a vertical gap run pre-opened across this
    subproblem's top-left / bottom-right corner by an enclosing bridge; the
    score uses those semantics (see _explicit_global). Each split hands the
    marks down the side that owns the corner, so every level keeps charging
    the bridged run extension-only where it crosses.
    """
    m, n = len(q), len(s)
    affine = scheme.gap_model == "affine"
    if m == 0:
        if n == 0:
            return [], 0, 0
        return [("D", n)], 0, -gap_cost(scheme, n)
    if n == 0:
        if affine and (gap_in or gap_out):
            return [("I", m)], 0, -scheme.gap_extend * m
        return [("I", m)], 0, -gap_cost(scheme, m)
    if m + n <= T_EXPLICIT or m == 1 or n == 1:
        return _explicit_global(q, s, scheme, gap_in, gap_out, meter)

    mid = m // 2
    fwd = _engine_pass(q.window(0, mid), s, cfg, scheme, tuning,
                       capture_last_row=True, left_preopened=gap_in,
                       stats=stats, meter=meter)
    rev = _engine_pass(q.window(mid, m).reversed_copy(), s.reversed_copy(),
                       cfg, scheme, tuning,
                       capture_last_row=True, left_preopened=gap_out,
                       stats=stats, meter=meter)
    cells = fwd.cells + rev.cells
    hf, hr = fwd.row_h, rev.row_h
    best_score = None
    best_j = 0
    e_join = False
    if affine:
        ef, er = fwd.row_e, rev.row_e
        refund = scheme.gap_open - scheme.gap_extend
    for j in range(n + 1):
        ch = int(hf[j]) + int(hr[n - j])
        if best_score is None or ch > best_score:
            best_score, best_j, e_join = ch, j, False
        if affine:
            ce = int(ef[j]) + int(er[n - j]) + refund
            if ce > best_score:
                best_score, best_j, e_join = ce, j, True
    if meter is not None:
        meter.sub(hf.nbytes + fwd.row_e.nbytes + hr.nbytes + rev.row_e.nbytes)

    j = best_j
    if not e_join:
        t_ops, t_cells, t_sc = _hirsch(q.window(0, mid), s.window(0, j),
                                       cfg, scheme, tuning, meter, stats,
                                       gap_in, False)
        b_ops, b_cells, b_sc = _hirsch(q.window(mid, m), s.window(j, n),
                                       cfg, scheme, tuning, meter, stats,
                                       False, gap_out)
        if t_sc + b_sc != best_score:
            raise WaveseqError(
                f"internal: split parts {t_sc}+{b_sc} != joined {best_score}")
        return t_ops + b_ops, cells + t_cells + b_cells, best_score
    # the optimal path crosses the midline inside a vertical gap run: the
    # query rows just above and below the midline are pinned to I ops and
    # both halves see the run as pre-opened at the pinned corner
    t_ops, t_cells, t_sc = _hirsch(q.window(0, mid - 1), s.window(0, j),
                                   cfg, scheme, tuning, meter, stats,
                                   gap_in, True)
    b_ops, b_cells, b_sc = _hirsch(q.window(mid + 1, m), s.window(j, n),
                                   cfg, scheme, tuning, meter, stats,
                                   True, gap_out)
    if (gap_in and j == 0) or (gap_out and j == n):
        # at j == 0 (j == n) every op above (below) the bridge is an I, so
        # the bridge continues the run pre-opened at that corner and its
        # open is already paid outside this subproblem
        bridge = 2 * scheme.gap_extend
    else:
        bridge = scheme.gap_open + scheme.gap_extend
    if t_sc + b_sc - bridge != best_score:
        raise WaveseqError(
            f"internal: bridged parts {t_sc}+{b_sc}-{bridge} != joined {best_score}")
    return t_ops + [("I", 2)] + b_ops, cells + t_cells + b_cells, best_score


def locate_endpoints(query: Sequence, subject: Sequence, cfg: AlignConfig,
                     scheme: ScoringScheme, tuning: EngineTuning | None = None,
                     stats: EngineStats | None = None):
    """Find a local or semiglobal alignment's score, start, and end cells.

    Returns (score, (q0, s0), (q1, s1), cells). The end comes from a
    forward sweep's running argmax; the start from the same sweep run on
    the reversed end-cell prefixes. A start equal to the end marks an
    empty alignment.
    """
    cfg = validate_config(cfg, scheme)
    if cfg.align_type == "global":
        raise ValueError("locate_endpoints applies to local and semiglobal only")
    m, n = len(query), len(subject)
    check_length_bounds(m, n, scheme)
    if tuning is None:
        tuning = auto_tuning(max(m, n))
    fwd = _engine_pass(query, subject, cfg, scheme, tuning, stats=stats)
    score = fwd.score
    qe, se = fwd.end
    if (cfg.align_type == "local" and score <= 0) or qe == 0 or se == 0:
        return score, (qe, se), (qe, se), fwd.cells
    rq = query.window(0, qe).reversed_copy()
    rs = subject.window(0, se).reversed_copy()
    # anchored: the reverse problem must start at the forward end cell, or a
    # co-optimal alignment elsewhere in the prefix could win and break the
    # score identity below
    rev = _engine_pass(rq, rs, cfg, scheme, tuning, stats=stats, anchored=True)
    if rev.score != score:
        raise WaveseqError(
            f"internal: reverse sweep score {rev.score} != forward {score}")
    qe2, se2 = rev.end
    return score, (qe - qe2, se - se2), (qe, se), fwd.cells + rev.cells


def align_traceback(query: Sequence, subject: Sequence, cfg: AlignConfig,
                    scheme: ScoringScheme, tuning: EngineTuning | None = None,
                    meter: AllocationMeter | None = None,
                    stats: EngineStats | None = None) -> AlignmentResult:
    """Alignment with operations, in linear memory, for any align type."""
    cfg = validate_config(cfg, scheme)
    m, n = len(query), len(subject)
    check_length_bounds(m, n, scheme)
    if tuning is None:
        tuning = auto_tuning(max(m, n))
    if cfg.align_type == "global":
        return hirschberg(query, subject, cfg, scheme, tuning, meter, stats)

    score, (q0, s0), (q1, s1), loc_cells = locate_endpoints(
        query, subject, cfg, scheme, tuning, stats=stats)
    if (q0, s0) == (q1, s1):
        return AlignmentResult(score=score, q_start=q0, q_end=q1,
                               s_start=s0, s_end=s1, ops=[],
                               cells_computed=loc_cells)
    cfg_g = validate_config(
        AlignConfig(align_type="global", gap_model=scheme.gap_model,
                    result_mode=cfg.result_mode), scheme)
    sub = hirschberg(query.window(q0, q1), subject.window(s0, s1),
                     cfg_g, scheme, tuning, meter, stats)
    if sub.score != score:
        raise WaveseqError(
            f"internal: window score {sub.score} != located score {score}")
    return AlignmentResult(score=score, q_start=q0, q_end=q1,
                           s_start=s0, s_end=s1, ops=sub.ops,
                           cells_computed=loc_cells + sub.cells_computed)
