"""Reference full-matrix alignment DP.

Straightforward quadratic-space implementation used as the correctness oracle
for the lane-group engine and the traceback module. Clarity over speed: this
is pure Python and may be orders of magnitude slower than the engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    NEG_INF,
    AlignConfig,
    AlignmentResult,
    ScoringScheme,
    Sequence,
    merge_ops,
    substitution_score,
    validate_config,
)


@dataclass
class DpMatrices:
    """Full (m+1) x (n+1) grids; E and F are None for the linear gap model."""

    H: list[list[int]]
    E: list[list[int]] | None
    F: list[list[int]] | None


def _profile_rows(subject: Sequence, scheme: ScoringScheme) -> list[list[int]]:
    """Per-query-symbol substitution rows; row 4 serves flagged query symbols."""
    sc = subject.codes.tolist()
    sf = subject.flags.tolist()
    match, mism = scheme.match_score, scheme.mismatch_score
    rows = [[mism if (f or d != c) else match for d, f in zip(sc, sf)]
            for c in range(4)]
    rows.append([mism] * len(sc))
    return rows


def fill_matrices(query: Sequence, subject: Sequence, cfg: AlignConfig,
                  scheme: ScoringScheme) -> DpMatrices:
    cfg = validate_config(cfg, scheme)
    m, n = len(query), len(subject)
    alpha = scheme.gap_open
    beta = scheme.gap_extend if scheme.gap_model == "affine" else scheme.gap_open
    nu = cfg.nu
    is_global = cfg.align_type == "global"

    H = [[0] * (n + 1) for _ in range(m + 1)]
    if is_global:
        for i in range(1, m + 1):
            H[i][0] = -(alpha + beta * (i - 1))
        for j in range(1, n + 1):
            H[0][j] = -(alpha + beta * (j - 1))

    prof = _profile_rows(subject, scheme)
    qrow = [4 if f else c for c, f in zip(query.codes.tolist(), query.flags.tolist())]

    if scheme.gap_model == "linear":
        for i in range(1, m + 1):
            row = H[i]
            up = H[i - 1]
            sub = prof[qrow[i - 1]]
            h_diag = up[0]
            h_left = row[0]
            for j in range(1, n + 1):
                e = up[j] - alpha
                f = h_left - alpha
                h = h_diag + sub[j - 1]
                if e > h:
                    h = e
                if f > h:
                    h = f
                if nu > h:
                    h = nu
                h_diag = up[j]
                row[j] = h
                h_left = h
        return DpMatrices(H, None, None)

    E = [[NEG_INF] * (n + 1) for _ in range(m + 1)]
    F = [[NEG_INF] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        E[i][0] = -(alpha + beta * (i - 1))
    for j in range(1, n + 1):
        F[0][j] = -(alpha + beta * (j - 1))

    for i in range(1, m + 1):
        row = H[i]
        up = H[i - 1]
        erow = E[i]
        eup = E[i - 1]
        frow = F[i]
        sub = prof[qrow[i - 1]]
        h_diag = up[0]
        h_left = row[0]
        f_left = frow[0]
        for j in range(1, n + 1):
            e = eup[j] - beta
            t = up[j] - alpha
            if t > e:
                e = t
            f = f_left - beta
            t = h_left - alpha
            if t > f:
                f = t
            h = h_diag + sub[j - 1]
            if e > h:
                h = e
            if f > h:
                h = f
            if nu > h:
                h = nu
            h_diag = up[j]
            erow[j] = e
            frow[j] = f
            row[j] = h
            h_left = h
            f_left = f
    return DpMatrices(H, E, F)


def _argmax(H: list[list[int]], m: int, n: int, align_type: str) -> tuple[int, tuple[int, int]]:
    """Best end cell for the align type; ties broken by smallest i, then smallest j."""
    if align_type == "global":
        return H[m][n], (m, n)
    if align_type == "local":
        best_v, bi, bj = 0, 0, 0
        for i in range(1, m + 1):
            row = H[i]
            for j in range(1, n + 1):
                if row[j] > best_v:
                    best_v, bi, bj = row[j], i, j
        return best_v, (bi, bj)
    # semiglobal: last column or last row, scanned in lexicographic cell order
    best_v, bi, bj = H[0][n], 0, n
    for i in range(1, m):
        if H[i][n] > best_v:
            best_v, bi, bj = H[i][n], i, n
    row = H[m]
    for j in range(0, n + 1):
        if row[j] > best_v:
            best_v, bi, bj = row[j], m, j
    return best_v, (bi, bj)


def ref_score(query: Sequence, subject: Sequence, cfg: AlignConfig,
              scheme: ScoringScheme) -> tuple[int, tuple[int, int]]:
    cfg = validate_config(cfg, scheme)
    dp = fill_matrices(query, subject, cfg, scheme)
    return _argmax(dp.H, len(query), len(subject), cfg.align_type)


def ref_traceback(query: Sequence, subject: Sequence, cfg: AlignConfig,
                  scheme: ScoringScheme) -> AlignmentResult:
    """Full-matrix traceback.

    Tie-break at every cell: diagonal, then the vertical gap branch (I), then
    the horizontal gap branch (D); inside a gap, extension before open. Local
    walks stop at the first cell whose value is 0.
    """
    cfg = validate_config(cfg, scheme)
    m, n = len(query), len(subject)
    dp = fill_matrices(query, subject, cfg, scheme)
    score, end = _argmax(dp.H, m, n, cfg.align_type)

    alpha = scheme.gap_open
    beta = scheme.gap_extend
    affine = scheme.gap_model == "affine"
    H, E, F = dp.H, dp.E, dp.F
    qc, qf = query.codes, query.flags
    sc, sf = subject.codes, subject.flags
    atype = cfg.align_type

    i, j = end
    ops_rev: list[tuple[str, int]] = []
    while True:
        if atype == "local" and H[i][j] == 0:
            break
        if i == 0 and j == 0:
            break
        if atype == "semiglobal" and (i == 0 or j == 0):
            break
        if atype == "global" and i == 0:
            ops_rev.append(("D", j))
            j = 0
            break
        if atype == "global" and j == 0:
            ops_rev.append(("I", i))
            i = 0
            break
        h = H[i][j]
        s = substitution_score(scheme, int(qc[i - 1]), int(sc[j - 1]),
                               bool(qf[i - 1]), bool(sf[j - 1]))
        if h == H[i - 1][j - 1] + s:
            ops_rev.append(("M", 1))
            i -= 1
            j -= 1
            continue
        if affine:
            if h == E[i][j]:
                while True:
                    ops_rev.append(("I", 1))
                    ext = E[i][j] == E[i - 1][j] - beta
                    i -= 1
                    if not ext:
                        break
                continue
            if h == F[i][j]:
                while True:
                    ops_rev.append(("D", 1))
                    ext = F[i][j] == F[i][j - 1] - beta
                    j -= 1
                    if not ext:
                        break
                continue
        else:
            if h == H[i - 1][j] - alpha:
                ops_rev.append(("I", 1))
                i -= 1
                continue
            if h == H[i][j - 1] - alpha:
                ops_rev.append(("D", 1))
                j -= 1
                continue
        raise AssertionError(f"no predecessor reproduces H[{i}][{j}]")

    ops = merge_ops(list(reversed(ops_rev)))
    qe, se = end
    return AlignmentResult(score=score, q_start=i, q_end=qe, s_start=j, s_end=se,
                           ops=ops, cells_computed=m * n)
