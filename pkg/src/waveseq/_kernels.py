"""Compiled lane-group wavefront kernels.

One lane group = p lanes advancing in lockstep over a stage of p*k matrix
columns; lane t computes row i-t of its k columns at iteration i, so a stage
finishes in m+p iterations. Values move between lanes the way a warp shuffle
would: lane t reads the rightmost cell lane t-1 produced in the previous
iteration. Query symbols live in two rotation registers per lane (cq0 holds
the symbol for the lane's current row, cq1 buffers upcoming symbols); query
memory is touched only at iterations i with i % p == 0. Stage boundary
columns are likewise staged through p-row blocks so boundary buffers see one
read and one write per p rows.

Kernel variants: linear gaps, affine with a merged gap state (4 max + 3
add/sub score ops per cell), affine with exact separate E/F propagation, and
16-bit saturating two-alignment packed versions of the first two.

align type codes: 0 global, 1 local, 2 semiglobal.
stats slots: see the S_* constants.
"""

import numpy as np
from numba import njit

NEG32 = -(2 ** 30)
NEG16 = -32768

S_QLOAD = 0        # query block loads
S_QLOAD_BAD = 1    # query loads at iterations not divisible by p
S_BLOAD = 2        # boundary block loads
S_BLOAD_BAD = 3    # boundary loads not aligned to p-row blocks
S_BSTORE = 4       # boundary block stores
S_BSTORE_BAD = 5   # boundary stores not aligned to p-row blocks
S_OPS_MAX = 6      # per-cell max score ops (instrumented runs only)
S_OPS_ADDSUB = 7   # per-cell add/sub score ops (instrumented runs only)
S_ITER = 8         # lockstep iterations, counting the load-only iteration 0
N_STATS = 9


@njit(cache=True, nogil=True)
def build_profile5(scodes, sflags, start, width, match, mism, out):
    """Substitution rows for one subject chunk in a single linear pass.

    Rows 0..3 are the query symbols A,C,G,T; row 4 serves flagged query
    symbols. Columns past the subject end are padding and score mismatch.
    """
    n = scodes.shape[0]
    for x in range(width):
        j = start + x
        if j < n:
            c = scodes[j]
            f = sflags[j]
            for a in range(4):
                out[a, x] = mism if (f or a != c) else match
        else:
            for a in range(4):
                out[a, x] = mism
        out[4, x] = mism
    return 0


@njit(cache=True, nogil=True)
def _top_init(gcol, top_global, alpha, beta_init):
    if top_global and gcol >= 1:
        return -(alpha + beta_init * (gcol - 1))
    return np.int64(0)


@njit(cache=True, nogil=True)
def stage_linear32(q5, m, prof, col0, chunk_len, n_total, p, k,
                   alpha, beta_init, atype, top_global,
                   b_in_h, b_out_h, H,
                   best, cap, row_h, do_rows, col_h, do_col,
                   stats, instrument):
    w = p * k
    for t in range(p):
        for c in range(k):
            H[t, c] = _top_init(col0 + t * k + c + 1, top_global, alpha, beta_init)

    h_left = np.full(p, NEG32, np.int64)
    h_diag = np.full(p, NEG32, np.int64)
    cq0 = np.full(p, 4, np.int64)
    cq1 = np.full(p, 4, np.int64)
    rstage = np.empty(p, np.int64)
    wstage = np.empty(p, np.int64)

    # boundary rows [0, p) staged before iteration 0; query symbols load
    # inside iteration 0 like every later block. Iteration 0 computes no
    # cells (every lane is above the band) but its shift section funnels
    # the top-row inits into the lane carries.
    for t in range(p):
        rstage[t] = b_in_h[t]
    stats[S_BLOAD] += 1
    h_left[0] = rstage[0]
    wstage[0] = _top_init(col0 + w, top_global, alpha, beta_init)

    use_floor = atype == 1
    track_all = use_floor or atype == 3
    semi = atype == 2

    for i in range(m + p):
        for t in range(p):
            r = i - t
            if r < 1 or r > m:
                continue
            q = cq0[t]
            h_run = h_left[t]
            h_diag_run = h_diag[t]
            cbase = t * k
            nlim = chunk_len - cbase
            if nlim > k:
                nlim = k
            lastrow = r == m
            for c in range(k):
                hu = np.int64(H[t, c])
                e = hu - alpha
                f = h_run - alpha
                h = h_diag_run + prof[q, cbase + c]
                if e > h:
                    h = e
                if f > h:
                    h = f
                if use_floor and h < 0:
                    h = 0
                h_diag_run = hu
                h_run = h
                H[t, c] = h
                if instrument:
                    stats[S_OPS_MAX] += 3 if use_floor else 2
                    stats[S_OPS_ADDSUB] += 3
                if c < nlim:
                    gc = col0 + cbase + c + 1
                    if track_all or (semi and (lastrow or gc == n_total)):
                        if h > best[0]:
                            best[0] = h
                            best[1] = r
                            best[2] = gc
                        elif h == best[0] and (r < best[1] or (r == best[1] and gc < best[2])):
                            best[1] = r
                            best[2] = gc
                    elif atype == 0 and lastrow and gc == n_total:
                        cap[0] = h
                    if lastrow and do_rows:
                        row_h[gc] = h
                    if do_col and gc == n_total:
                        col_h[r] = h
        rout = i - (p - 1)
        if 1 <= rout <= m:
            wstage[rout % p] = H[p - 1, k - 1]
            if (rout % p) == p - 1 or rout == m:
                base = rout - (rout % p)
                for x in range(rout % p + 1):
                    b_out_h[base + x] = wstage[x]
                stats[S_BSTORE] += 1
                if base % p != 0:
                    stats[S_BSTORE_BAD] += 1
        for t in range(p - 1, 0, -1):
            h_diag[t] = h_left[t]
            h_left[t] = H[t - 1, k - 1]
        h_diag[0] = h_left[0]
        nxt = i + 1
        if nxt % p == 0:
            for t in range(p):
                rstage[t] = b_in_h[nxt + t]
            stats[S_BLOAD] += 1
        h_left[0] = rstage[nxt % p]
        if i % p == 0:
            for t in range(p):
                cq1[t] = q5[i + t]
            stats[S_QLOAD] += 1
        for t in range(p - 1, 0, -1):
            cq0[t] = cq0[t - 1]
        cq0[0] = cq1[0]
        for t in range(p - 1):
            cq1[t] = cq1[t + 1]
        cq1[p - 1] = 4
    stats[S_ITER] += m + p
    return 0


@njit(cache=True, nogil=True)
def run_linear32(q5, m, scodes, sflags, n, p, k, match, mism, alpha, atype, top_global,
                 bh_a, bh_b, H, prof,
                 best, cap, row_h, do_rows, col_h, do_col,
                 stats, instrument):
    w = p * k
    stages = (n + w - 1) // w
    for s in range(stages):
        col0 = s * w
        chunk = n - col0
        if chunk > w:
            chunk = w
        build_profile5(scodes, sflags, col0, w, match, mism, prof)
        if s % 2 == 0:
            stage_linear32(q5, m, prof, col0, chunk, n, p, k, alpha, alpha, atype,
                           top_global, bh_a, bh_b, H,
                           best, cap, row_h, do_rows, col_h, do_col, stats, instrument)
        else:
            stage_linear32(q5, m, prof, col0, chunk, n, p, k, alpha, alpha, atype,
                           top_global, bh_b, bh_a, H,
                           best, cap, row_h, do_rows, col_h, do_col, stats, instrument)
    return stages


@njit(cache=True, nogil=True)
def stage_merged32(q5, m, prof, col0, chunk_len, n_total, p, k,
                   alpha, beta, atype, top_global,
                   b_in_h, b_in_g, b_out_h, b_out_g, H, G,
                   best, cap, row_h, do_rows, col_h, col_g, do_col,
                   stats, instrument):
    """Affine stage with the merged gap state G = max(E, F).

    Exactly 4 max and 3 add/sub score ops per cell: the two gap matrices
    share one beta subtraction through max(G_up, G_left) - beta and one alpha
    subtraction through max(H_up, H_left) - alpha. Identical to exact Gotoh
    whenever gap corners are dominated (see engine.merged_state_exact).
    """
    w = p * k
    for t in range(p):
        for c in range(k):
            H[t, c] = _top_init(col0 + t * k + c + 1, top_global, alpha, beta)
            G[t, c] = NEG32

    h_left = np.full(p, NEG32, np.int64)
    h_diag = np.full(p, NEG32, np.int64)
    g_left = np.full(p, NEG32, np.int64)
    cq0 = np.full(p, 4, np.int64)
    cq1 = np.full(p, 4, np.int64)
    rstage_h = np.empty(p, np.int64)
    rstage_g = np.empty(p, np.int64)
    wstage_h = np.empty(p, np.int64)
    wstage_g = np.empty(p, np.int64)

    for t in range(p):
        rstage_h[t] = b_in_h[t]
        rstage_g[t] = b_in_g[t]
    stats[S_BLOAD] += 1
    h_left[0] = rstage_h[0]
    wstage_h[0] = _top_init(col0 + w, top_global, alpha, beta)
    wstage_g[0] = NEG32

    use_floor = atype == 1
    track_all = use_floor or atype == 3
    semi = atype == 2

    for i in range(m + p):
        for t in range(p):
            r = i - t
            if r < 1 or r > m:
                continue
            q = cq0[t]
            h_run = h_left[t]
            h_diag_run = h_diag[t]
            g_run = g_left[t]
            cbase = t * k
            nlim = chunk_len - cbase
            if nlim > k:
                nlim = k
            lastrow = r == m
            for c in range(k):
                hu = np.int64(H[t, c])
                gu = np.int64(G[t, c])
                x = gu if gu > g_run else g_run
                o = hu if hu > h_run else h_run
                x -= beta
                o -= alpha
                g = x if x > o else o
                h = h_diag_run + prof[q, cbase + c]
                if g > h:
                    h = g
                if use_floor and h < 0:
                    h = 0
                h_diag_run = hu
                h_run = h
                g_run = g
                H[t, c] = h
                G[t, c] = g
                if instrument:
                    stats[S_OPS_MAX] += 5 if use_floor else 4
                    stats[S_OPS_ADDSUB] += 3
                if c < nlim:
                    gc = col0 + cbase + c + 1
                    if track_all or (semi and (lastrow or gc == n_total)):
                        if h > best[0]:
                            best[0] = h
                            best[1] = r
                            best[2] = gc
                        elif h == best[0] and (r < best[1] or (r == best[1] and gc < best[2])):
                            best[1] = r
                            best[2] = gc
                    elif atype == 0 and lastrow and gc == n_total:
                        cap[0] = h
                    if lastrow and do_rows:
                        row_h[gc] = h
                    if do_col and gc == n_total:
                        col_h[r] = h
                        col_g[r] = g
        rout = i - (p - 1)
        if 1 <= rout <= m:
            wstage_h[rout % p] = H[p - 1, k - 1]
            wstage_g[rout % p] = G[p - 1, k - 1]
            if (rout % p) == p - 1 or rout == m:
                base = rout - (rout % p)
                for x in range(rout % p + 1):
                    b_out_h[base + x] = wstage_h[x]
                    b_out_g[base + x] = wstage_g[x]
                stats[S_BSTORE] += 1
                if base % p != 0:
                    stats[S_BSTORE_BAD] += 1
        for t in range(p - 1, 0, -1):
            h_diag[t] = h_left[t]
            h_left[t] = H[t - 1, k - 1]
            g_left[t] = G[t - 1, k - 1]
        h_diag[0] = h_left[0]
        nxt = i + 1
        if nxt % p == 0:
            for t in range(p):
                rstage_h[t] = b_in_h[nxt + t]
                rstage_g[t] = b_in_g[nxt + t]
            stats[S_BLOAD] += 1
        h_left[0] = rstage_h[nxt % p]
        g_left[0] = rstage_g[nxt % p]
        if i % p == 0:
            for t in range(p):
                cq1[t] = q5[i + t]
            stats[S_QLOAD] += 1
        for t in range(p - 1, 0, -1):
            cq0[t] = cq0[t - 1]
        cq0[0] = cq1[0]
        for t in range(p - 1):
            cq1[t] = cq1[t + 1]
        cq1[p - 1] = 4
    stats[S_ITER] += m + p
    return 0


@njit(cache=True, nogil=True)
def run_merged32(q5, m, scodes, sflags, n, p, k, match, mism, alpha, beta, atype, top_global,
                 bh_a, bg_a, bh_b, bg_b, H, G, prof,
                 best, cap, row_h, do_rows, col_h, col_g, do_col,
                 stats, instrument):
    w = p * k
    stages = (n + w - 1) // w
    for s in range(stages):
        col0 = s * w
        chunk = n - col0
        if chunk > w:
            chunk = w
        build_profile5(scodes, sflags, col0, w, match, mism, prof)
        if s % 2 == 0:
            stage_merged32(q5, m, prof, col0, chunk, n, p, k, alpha, beta, atype, top_global,
                           bh_a, bg_a, bh_b, bg_b, H, G,
                           best, cap, row_h, do_rows, col_h, col_g, do_col, stats, instrument)
        else:
            stage_merged32(q5, m, prof, col0, chunk, n, p, k, alpha, beta, atype, top_global,
                           bh_b, bg_b, bh_a, bg_a, H, G,
                           best, cap, row_h, do_rows, col_h, col_g, do_col, stats, instrument)
    return stages


@njit(cache=True, nogil=True)
def stage_exact32(q5, m, prof, col0, chunk_len, n_total, p, k,
                  alpha, beta, atype, top_global,
                  b_in_h, b_in_g, b_out_h, b_out_g, H, Ep, A,
                  best, cap, row_h, row_e, do_rows, col_h, col_g, do_col,
                  stats, instrument):
    """Affine stage with exact separate E/F gap states.

    Ep holds E - beta (pre-subtracted for the next row), A holds H - alpha;
    the horizontal state travels as F - beta in the lane carry and in the
    boundary gap column. 4 max + 4 add/sub score ops per cell.
    """
    w = p * k
    for t in range(p):
        for c in range(k):
            top = _top_init(col0 + t * k + c + 1, top_global, alpha, beta)
            H[t, c] = top
            A[t, c] = top - alpha
            Ep[t, c] = NEG32

    h_left = np.full(p, NEG32, np.int64)
    h_diag = np.full(p, NEG32, np.int64)
    fp_left = np.full(p, NEG32, np.int64)
    fp_last = np.full(p, NEG32, np.int64)
    a_left = np.full(p, NEG32, np.int64)
    cq0 = np.full(p, 4, np.int64)
    cq1 = np.full(p, 4, np.int64)
    rstage_h = np.empty(p, np.int64)
    rstage_g = np.empty(p, np.int64)
    wstage_h = np.empty(p, np.int64)
    wstage_g = np.empty(p, np.int64)

    for t in range(p):
        rstage_h[t] = b_in_h[t]
        rstage_g[t] = b_in_g[t]
    stats[S_BLOAD] += 1
    h_left[0] = rstage_h[0]
    wstage_h[0] = _top_init(col0 + w, top_global, alpha, beta)
    wstage_g[0] = NEG32

    use_floor = atype == 1
    track_all = use_floor or atype == 3
    semi = atype == 2

    for i in range(m + p):
        for t in range(p):
            r = i - t
            if r < 1 or r > m:
                continue
            q = cq0[t]
            h_diag_run = h_diag[t]
            fp_run = fp_left[t]
            a_run = a_left[t]
            cbase = t * k
            nlim = chunk_len - cbase
            if nlim > k:
                nlim = k
            lastrow = r == m
            for c in range(k):
                hu = np.int64(H[t, c])
                ep = np.int64(Ep[t, c])
                au = np.int64(A[t, c])
                e = ep if ep > au else au
                f = fp_run if fp_run > a_run else a_run
                h = h_diag_run + prof[q, cbase + c]
                if e > h:
                    h = e
                if f > h:
                    h = f
                if use_floor and h < 0:
                    h = 0
                a = h - alpha
                h_diag_run = hu
                fp_run = f - beta
                a_run = a
                Ep[t, c] = e - beta
                A[t, c] = a
                H[t, c] = h
                if instrument:
                    stats[S_OPS_MAX] += 5 if use_floor else 4
                    stats[S_OPS_ADDSUB] += 4
                if c < nlim:
                    gc = col0 + cbase + c + 1
                    if track_all or (semi and (lastrow or gc == n_total)):
                        if h > best[0]:
                            best[0] = h
                            best[1] = r
                            best[2] = gc
                        elif h == best[0] and (r < best[1] or (r == best[1] and gc < best[2])):
                            best[1] = r
                            best[2] = gc
                    elif atype == 0 and lastrow and gc == n_total:
                        cap[0] = h
                    if lastrow and do_rows:
                        row_h[gc] = h
                        row_e[gc] = e
                    if do_col and gc == n_total:
                        col_h[r] = h
                        col_g[r] = f
            fp_last[t] = fp_run
        rout = i - (p - 1)
        if 1 <= rout <= m:
            wstage_h[rout % p] = H[p - 1, k - 1]
            wstage_g[rout % p] = fp_last[p - 1]
            if (rout % p) == p - 1 or rout == m:
                base = rout - (rout % p)
                for x in range(rout % p + 1):
                    b_out_h[base + x] = wstage_h[x]
                    b_out_g[base + x] = wstage_g[x]
                stats[S_BSTORE] += 1
                if base % p != 0:
                    stats[S_BSTORE_BAD] += 1
        for t in range(p - 1, 0, -1):
            h_diag[t] = h_left[t]
            h_left[t] = H[t - 1, k - 1]
            a_left[t] = A[t - 1, k - 1]
            fp_left[t] = fp_last[t - 1]
        h_diag[0] = h_left[0]
        nxt = i + 1
        if nxt % p == 0:
            for t in range(p):
                rstage_h[t] = b_in_h[nxt + t]
                rstage_g[t] = b_in_g[nxt + t]
            stats[S_BLOAD] += 1
        h_left[0] = rstage_h[nxt % p]
        fp_left[0] = rstage_g[nxt % p]
        a_left[0] = rstage_h[nxt % p] - alpha
        if i % p == 0:
            for t in range(p):
                cq1[t] = q5[i + t]
            stats[S_QLOAD] += 1
        for t in range(p - 1, 0, -1):
            cq0[t] = cq0[t - 1]
        cq0[0] = cq1[0]
        for t in range(p - 1):
            cq1[t] = cq1[t + 1]
        cq1[p - 1] = 4
    stats[S_ITER] += m + p
    return 0


@njit(cache=True, nogil=True)
def run_exact32(q5, m, scodes, sflags, n, p, k, match, mism, alpha, beta, atype, top_global,
                bh_a, bg_a, bh_b, bg_b, H, Ep, A, prof,
                best, cap, row_h, row_e, do_rows, col_h, col_g, do_col,
                stats, instrument):
    w = p * k
    stages = (n + w - 1) // w
    for s in range(stages):
        col0 = s * w
        chunk = n - col0
        if chunk > w:
            chunk = w
        build_profile5(scodes, sflags, col0, w, match, mism, prof)
        if s % 2 == 0:
            stage_exact32(q5, m, prof, col0, chunk, n, p, k, alpha, beta, atype, top_global,
                          bh_a, bg_a, bh_b, bg_b, H, Ep, A,
                          best, cap, row_h, row_e, do_rows, col_h, col_g, do_col,
                          stats, instrument)
        else:
            stage_exact32(q5, m, prof, col0, chunk, n, p, k, alpha, beta, atype, top_global,
                          bh_b, bg_b, bh_a, bg_a, H, Ep, A,
                          best, cap, row_h, row_e, do_rows, col_h, col_g, do_col,
                          stats, instrument)
    return stages


@njit(cache=True, nogil=True)
def _sat16(v):
    if v > 32767:
        return np.int64(32767)
    if v < -32768:
        return np.int64(-32768)
    return v


@njit(cache=True, nogil=True)
def build_profile5_packed(scodes, sflags, nsub, start, width, match, mism, hf, out):
    for x in range(width):
        j = start + x
        if j < nsub:
            c = scodes[j]
            f = sflags[j]
            for a in range(4):
                out[hf, a, x] = mism if (f or a != c) else match
        else:
            for a in range(4):
                out[hf, a, x] = mism
        out[hf, 4, x] = mism
    return 0


@njit(cache=True, nogil=True)
def stage_linear16(q5, mm, mh, prof, col0, nh, p, k,
                   alpha, atype, top_global,
                   b_in_h, b_out_h, H,
                   best, cap, stats, instrument):
    """Packed linear stage: two alignments ride the halves of int16 pairs.

    mm is the iteration row count (max of the two halves); mh/nh give each
    half's true extents for extraction masking. Arithmetic saturates at the
    int16 bounds so the NEG16 sentinel never wraps. Junk cells outside a
    half's rectangle only ever flow right/down, away from it.
    """
    w = p * k
    for t in range(p):
        for c in range(k):
            gcol = col0 + t * k + c + 1
            for hf in range(2):
                if top_global:
                    H[t, c, hf] = _sat16(-(alpha + alpha * (gcol - 1)))
                else:
                    H[t, c, hf] = 0

    h_left = np.full((p, 2), NEG16, np.int64)
    h_diag = np.full((p, 2), NEG16, np.int64)
    cq0 = np.full((p, 2), 4, np.int64)
    cq1 = np.full((p, 2), 4, np.int64)
    rstage = np.empty((p, 2), np.int64)
    wstage = np.empty((p, 2), np.int64)

    for t in range(p):
        for hf in range(2):
            rstage[t, hf] = b_in_h[t, hf]
    stats[S_BLOAD] += 1
    gright = col0 + w
    for hf in range(2):
        h_left[0, hf] = rstage[0, hf]
        if top_global:
            wstage[0, hf] = _sat16(-(alpha + alpha * (gright - 1)))
        else:
            wstage[0, hf] = 0

    use_floor = atype == 1
    semi = atype == 2

    for i in range(mm + p):
        for t in range(p):
            r = i - t
            if r < 1 or r > mm:
                continue
            cbase = t * k
            for hf in range(2):
                q = cq0[t, hf]
                h_run = h_left[t, hf]
                h_diag_run = h_diag[t, hf]
                rowok = r <= mh[hf]
                lastrow = r == mh[hf]
                n_half = nh[hf]
                for c in range(k):
                    hu = np.int64(H[t, c, hf])
                    e = _sat16(hu - alpha)
                    f = _sat16(h_run - alpha)
                    h = _sat16(h_diag_run + prof[hf, q, cbase + c])
                    if e > h:
                        h = e
                    if f > h:
                        h = f
                    if use_floor and h < 0:
                        h = 0
                    h_diag_run = hu
                    h_run = h
                    H[t, c, hf] = h
                    if instrument and hf == 0:
                        stats[S_OPS_MAX] += 3 if use_floor else 2
                        stats[S_OPS_ADDSUB] += 3
                    gc = col0 + cbase + c + 1
                    if rowok and gc <= n_half:
                        atcol = gc == n_half
                        if use_floor or (semi and (lastrow or atcol)):
                            if h > best[hf, 0]:
                                best[hf, 0] = h
                                best[hf, 1] = r
                                best[hf, 2] = gc
                            elif h == best[hf, 0] and (r < best[hf, 1] or (r == best[hf, 1] and gc < best[hf, 2])):
                                best[hf, 1] = r
                                best[hf, 2] = gc
                        elif atype == 0 and lastrow and atcol:
                            cap[hf] = h
        rout = i - (p - 1)
        if 1 <= rout <= mm:
            for hf in range(2):
                wstage[rout % p, hf] = H[p - 1, k - 1, hf]
            if (rout % p) == p - 1 or rout == mm:
                base = rout - (rout % p)
                for x in range(rout % p + 1):
                    for hf in range(2):
                        b_out_h[base + x, hf] = wstage[x, hf]
                stats[S_BSTORE] += 1
                if base % p != 0:
                    stats[S_BSTORE_BAD] += 1
        for t in range(p - 1, 0, -1):
            for hf in range(2):
                h_diag[t, hf] = h_left[t, hf]
                h_left[t, hf] = H[t - 1, k - 1, hf]
        nxt = i + 1
        if nxt % p == 0:
            for t in range(p):
                for hf in range(2):
                    rstage[t, hf] = b_in_h[nxt + t, hf]
            stats[S_BLOAD] += 1
        for hf in range(2):
            h_diag[0, hf] = h_left[0, hf]
            h_left[0, hf] = rstage[nxt % p, hf]
        if i % p == 0:
            for t in range(p):
                for hf in range(2):
                    cq1[t, hf] = q5[hf, i + t]
            stats[S_QLOAD] += 1
        for t in range(p - 1, 0, -1):
            for hf in range(2):
                cq0[t, hf] = cq0[t - 1, hf]
        for hf in range(2):
            cq0[0, hf] = cq1[0, hf]
        for t in range(p - 1):
            for hf in range(2):
                cq1[t, hf] = cq1[t + 1, hf]
        for hf in range(2):
            cq1[p - 1, hf] = 4
    stats[S_ITER] += mm + p
    return 0


@njit(cache=True, nogil=True)
def run_linear16(q5, mm, mh, sc_a, sf_a, sc_b, sf_b, nn, nh, p, k, match, mism, alpha,
                 atype, top_global, bh_a, bh_b, H, prof, best, cap, stats, instrument):
    w = p * k
    stages = (nn + w - 1) // w
    for s in range(stages):
        col0 = s * w
        build_profile5_packed(sc_a, sf_a, nh[0], col0, w, match, mism, 0, prof)
        build_profile5_packed(sc_b, sf_b, nh[1], col0, w, match, mism, 1, prof)
        if s % 2 == 0:
            stage_linear16(q5, mm, mh, prof, col0, nh, p, k, alpha, atype, top_global,
                           bh_a, bh_b, H, best, cap, stats, instrument)
        else:
            stage_linear16(q5, mm, mh, prof, col0, nh, p, k, alpha, atype, top_global,
                           bh_b, bh_a, H, best, cap, stats, instrument)
    return stages


@njit(cache=True, nogil=True)
def stage_merged16(q5, mm, mh, prof, col0, nh, p, k,
                   alpha, beta, atype, top_global,
                   b_in_h, b_in_g, b_out_h, b_out_g, H, G,
                   best, cap, stats, instrument):
    """Packed affine stage, merged gap state, int16 halves with saturation."""
    w = p * k
    for t in range(p):
        for c in range(k):
            gcol = col0 + t * k + c + 1
            for hf in range(2):
                if top_global:
                    H[t, c, hf] = _sat16(-(alpha + beta * (gcol - 1)))
                else:
                    H[t, c, hf] = 0
                G[t, c, hf] = NEG16

    h_left = np.full((p, 2), NEG16, np.int64)
    h_diag = np.full((p, 2), NEG16, np.int64)
    g_left = np.full((p, 2), NEG16, np.int64)
    cq0 = np.full((p, 2), 4, np.int64)
    cq1 = np.full((p, 2), 4, np.int64)
    rstage_h = np.empty((p, 2), np.int64)
    rstage_g = np.empty((p, 2), np.int64)
    wstage_h = np.empty((p, 2), np.int64)
    wstage_g = np.empty((p, 2), np.int64)

    for t in range(p):
        for hf in range(2):
            rstage_h[t, hf] = b_in_h[t, hf]
            rstage_g[t, hf] = b_in_g[t, hf]
    stats[S_BLOAD] += 1
    gright = col0 + w
    for hf in range(2):
        h_left[0, hf] = rstage_h[0, hf]
        if top_global:
            wstage_h[0, hf] = _sat16(-(alpha + beta * (gright - 1)))
        else:
            wstage_h[0, hf] = 0
        wstage_g[0, hf] = NEG16

    use_floor = atype == 1
    semi = atype == 2

    for i in range(mm + p):
        for t in range(p):
            r = i - t
            if r < 1 or r > mm:
                continue
            cbase = t * k
            for hf in range(2):
                q = cq0[t, hf]
                h_run = h_left[t, hf]
                h_diag_run = h_diag[t, hf]
                g_run = g_left[t, hf]
                rowok = r <= mh[hf]
                lastrow = r == mh[hf]
                n_half = nh[hf]
                for c in range(k):
                    hu = np.int64(H[t, c, hf])
                    gu = np.int64(G[t, c, hf])
                    x = gu if gu > g_run else g_run
                    o = hu if hu > h_run else h_run
                    x = _sat16(x - beta)
                    o = _sat16(o - alpha)
                    g = x if x > o else o
                    h = _sat16(h_diag_run + prof[hf, q, cbase + c])
                    if g > h:
                        h = g
                    if use_floor and h < 0:
                        h = 0
                    h_diag_run = hu
                    h_run = h
                    g_run = g
                    H[t, c, hf] = h
                    G[t, c, hf] = g
                    if instrument and hf == 0:
                        stats[S_OPS_MAX] += 5 if use_floor else 4
                        stats[S_OPS_ADDSUB] += 3
                    gc = col0 + cbase + c + 1
                    if rowok and gc <= n_half:
                        atcol = gc == n_half
                        if use_floor or (semi and (lastrow or atcol)):
                            if h > best[hf, 0]:
                                best[hf, 0] = h
                                best[hf, 1] = r
                                best[hf, 2] = gc
                            elif h == best[hf, 0] and (r < best[hf, 1] or (r == best[hf, 1] and gc < best[hf, 2])):
                                best[hf, 1] = r
                                best[hf, 2] = gc
                        elif atype == 0 and lastrow and atcol:
                            cap[hf] = h
        rout = i - (p - 1)
        if 1 <= rout <= mm:
            for hf in range(2):
                wstage_h[rout % p, hf] = H[p - 1, k - 1, hf]
                wstage_g[rout % p, hf] = G[p - 1, k - 1, hf]
            if (rout % p) == p - 1 or rout == mm:
                base = rout - (rout % p)
                for x in range(rout % p + 1):
                    for hf in range(2):
                        b_out_h[base + x, hf] = wstage_h[x, hf]
                        b_out_g[base + x, hf] = wstage_g[x, hf]
                stats[S_BSTORE] += 1
                if base % p != 0:
                    stats[S_BSTORE_BAD] += 1
        for t in range(p - 1, 0, -1):
            for hf in range(2):
                h_diag[t, hf] = h_left[t, hf]
                h_left[t, hf] = H[t - 1, k - 1, hf]
                g_left[t, hf] = G[t - 1, k - 1, hf]
        nxt = i + 1
        if nxt % p == 0:
            for t in range(p):
                for hf in range(2):
                    rstage_h[t, hf] = b_in_h[nxt + t, hf]
                    rstage_g[t, hf] = b_in_g[nxt + t, hf]
            stats[S_BLOAD] += 1
        for hf in range(2):
            h_diag[0, hf] = h_left[0, hf]
            h_left[0, hf] = rstage_h[nxt % p, hf]
            g_left[0, hf] = rstage_g[nxt % p, hf]
        if i % p == 0:
            for t in range(p):
                for hf in range(2):
                    cq1[t, hf] = q5[hf, i + t]
            stats[S_QLOAD] += 1
        for t in range(p - 1, 0, -1):
            for hf in range(2):
                cq0[t, hf] = cq0[t - 1, hf]
        for hf in range(2):
            cq0[0, hf] = cq1[0, hf]
        for t in range(p - 1):
            for hf in range(2):
                cq1[t, hf] = cq1[t + 1, hf]
        for hf in range(2):
            cq1[p - 1, hf] = 4
    stats[S_ITER] += mm + p
    return 0


@njit(cache=True, nogil=True)
def run_merged16(q5, mm, mh, sc_a, sf_a, sc_b, sf_b, nn, nh, p, k, match, mism, alpha, beta,
                 atype, top_global, bh_a, bg_a, bh_b, bg_b, H, G, prof, best, cap,
                 stats, instrument):
    w = p * k
    stages = (nn + w - 1) // w
    for s in range(stages):
        col0 = s * w
        build_profile5_packed(sc_a, sf_a, nh[0], col0, w, match, mism, 0, prof)
        build_profile5_packed(sc_b, sf_b, nh[1], col0, w, match, mism, 1, prof)
        if s % 2 == 0:
            stage_merged16(q5, mm, mh, prof, col0, nh, p, k, alpha, beta, atype, top_global,
                           bh_a, bg_a, bh_b, bg_b, H, G, best, cap, stats, instrument)
        else:
            stage_merged16(q5, mm, mh, prof, col0, nh, p, k, alpha, beta, atype, top_global,
                           bh_b, bg_b, bh_a, bg_a, H, G, best, cap, stats, instrument)
    return stages
