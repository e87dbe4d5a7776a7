"""Batch execution of alignment tasks over a thread worker pool.

Tasks are independent and the score kernels release the GIL, so plain
threads scale with cores. Results land in per-pair slots, which makes the
output order independent of scheduling; the unit plan itself is a pure
function of the job, so reports are identical across worker counts.
"""

from __future__ import annotations

import os
import queue
import threading
import time
from dataclasses import dataclass

from .core import (
    AlignConfig,
    AlignmentResult,
    BatchError,
    ScoringScheme,
    Sequence,
    validate_config,
)
from .engine import (
    EngineTuning,
    engine_score,
    engine_score_packed,
    merged_state_exact,
    packed_range_ok,
)
from .traceback import align_traceback

# work-stealing granularity: a queue chunk covers about this many pairs,
# small enough to rebalance length-skewed batches, large enough to amortize
# queue traffic
CHUNK_PAIRS = 64


def resolve_workers(requested: int = 0) -> int:
    """Worker count: the WAVESEQ_WORKERS env var wins, then the request, then cpu_count."""
    env = os.environ.get("WAVESEQ_WORKERS")
    if env is not None:
        try:
            w = int(env)
        except ValueError:
            raise ValueError(
                f"WAVESEQ_WORKERS must be an integer, got {env!r}") from None
    elif requested:
        w = requested
    else:
        w = os.cpu_count() or 1
    if w < 1:
        raise ValueError(f"worker count must be positive, got {w}")
    return w


def all_pairs(queries: list[Sequence],
              subjects: list[Sequence]) -> list[tuple[int, int]]:
    """Cartesian product of index pairs in row-major order."""
    if not queries or not subjects:
        raise ValueError("both sequence lists must be non-empty")
    ns = len(subjects)
    return [(qi, si) for qi in range(len(queries)) for si in range(ns)]


@dataclass
class BatchJob:
    """One batch: the sequence pools, index pairs to align, and execution knobs.

    workers=0 means auto (environment override, else CPU count). tuning=None
    lets each task pick its own stage shape from the sequence lengths.
    """

    queries: list[Sequence]
    subjects: list[Sequence]
    pairs: list[tuple[int, int]]
    cfg: AlignConfig
    scheme: ScoringScheme
    tuning: EngineTuning | None = None
    workers: int = 0

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("pairs must be non-empty")
        nq, ns = len(self.queries), len(self.subjects)
        for qi, si in self.pairs:
            if not (0 <= qi < nq and 0 <= si < ns):
                raise ValueError(f"pair ({qi}, {si}) is out of range")


@dataclass
class BatchReport:
    """results[i] belongs to pairs[i]; total_cells is the sum of m*n over pairs."""

    results: list[AlignmentResult]
    wall_time: float
    total_cells: int

    @property
    def gcups(self) -> float:
        return self.total_cells / max(self.wall_time, 1e-12) / 1e9


def _score_result(score: int, end: tuple[int, int], cells: int,
                  m: int, n: int, cfg: AlignConfig) -> AlignmentResult:
    if cfg.align_type == "global":
        return AlignmentResult(score=score, q_start=0, q_end=m,
                               s_start=0, s_end=n, ops=None,
                               cells_computed=cells)
    # start is unknowable without a traceback pass; both span ends carry
    # the argmax cell
    return AlignmentResult(score=score, q_start=end[0], q_end=end[0],
                           s_start=end[1], s_end=end[1], ops=None,
                           cells_computed=cells)


def _plan_units(job: BatchJob, cfg: AlignConfig) -> list[tuple[int, ...]]:
    """Execution units: (i,) runs pair i alone, (i, j) packs two pairs.

    Packing applies only in score-only mode with a packed tuning and a
    scheme the merged 16-bit state represents exactly; pairs are bucketed by
    the power of two covering max(m, n) so packed partners do near-equal
    work, and anything out of 16-bit range or left over runs unpacked.
    """
    packed = (job.tuning is not None and job.tuning.packed
              and cfg.result_mode == "score_only")
    if packed and job.scheme.gap_model == "affine" and not merged_state_exact(job.scheme):
        packed = False
    if not packed:
        return [(i,) for i in range(len(job.pairs))]
    buckets: dict[int, list[int]] = {}
    singles: list[int] = []
    for i, (qi, si) in enumerate(job.pairs):
        m, n = len(job.queries[qi]), len(job.subjects[si])
        if not packed_range_ok(job.scheme, m, n):
            singles.append(i)
            continue
        key = max(0, (max(m, n) - 1).bit_length())
        buckets.setdefault(key, []).append(i)
    units: list[tuple[int, ...]] = []
    for key in sorted(buckets):
        idxs = buckets[key]
        for a in range(0, len(idxs) - 1, 2):
            units.append((idxs[a], idxs[a + 1]))
        if len(idxs) % 2:
            singles.append(idxs[-1])
    units.extend((i,) for i in sorted(singles))
    return units


def _chunk_units(units: list[tuple[int, ...]]) -> list[list[tuple[int, ...]]]:
    chunks: list[list[tuple[int, ...]]] = []
    cur: list[tuple[int, ...]] = []
    covered = 0
    for u in units:
        cur.append(u)
        covered += len(u)
        if covered >= CHUNK_PAIRS:
            chunks.append(cur)
            cur, covered = [], 0
    if cur:
        chunks.append(cur)
    return chunks


def _run_unit(unit: tuple[int, ...], job: BatchJob, cfg: AlignConfig,
              results: list) -> None:
    if len(unit) == 1:
        i = unit[0]
        qi, si = job.pairs[i]
        q, s = job.queries[qi], job.subjects[si]
        try:
            if cfg.result_mode == "traceback":
                results[i] = align_traceback(q, s, cfg, job.scheme, job.tuning)
            else:
                score, end, cells = engine_score(q, s, cfg, job.scheme, job.tuning)
                results[i] = _score_result(score, end, cells, len(q), len(s), cfg)
        except Exception as exc:
            raise BatchError(i, exc) from exc
        return
    ia, ib = unit
    qa, sa = (job.queries[job.pairs[ia][0]], job.subjects[job.pairs[ia][1]])
    qb, sb = (job.queries[job.pairs[ib][0]], job.subjects[job.pairs[ib][1]])
    try:
        out_a, out_b, _ = engine_score_packed((qa, sa), (qb, sb),
                                              cfg, job.scheme, job.tuning)
    except Exception as exc:
        raise BatchError(ia, exc) from exc
    # per-half cell counts so packed results match the single-pair API exactly
    results[ia] = _score_result(out_a[0], out_a[1], len(qa) * len(sa),
                                len(qa), len(sa), cfg)
    results[ib] = _score_result(out_b[0], out_b[1], len(qb) * len(sb),
                                len(qb), len(sb), cfg)


def run_batch(job: BatchJob) -> BatchReport:
    """Align every pair in the job; results keep the pairs' order.

    A failing pair aborts the batch with BatchError carrying its index.
    """
    cfg = validate_config(job.cfg, job.scheme)
    workers = resolve_workers(job.workers)
    units = _plan_units(job, cfg)
    chunks = _chunk_units(units)
    results: list[AlignmentResult | None] = [None] * len(job.pairs)
    t0 = time.perf_counter()
    if workers == 1 or len(chunks) == 1:
        for chunk in chunks:
            for unit in chunk:
                _run_unit(unit, job, cfg, results)
    else:
        work: queue.SimpleQueue = queue.SimpleQueue()
        for chunk in chunks:
            work.put(chunk)
        stop = threading.Event()
        errors: list[BatchError] = []
        err_lock = threading.Lock()

        def worker() -> None:
            while not stop.is_set():
                try:
                    chunk = work.get_nowait()
                except queue.Empty:
                    return
                for unit in chunk:
                    try:
                        _run_unit(unit, job, cfg, results)
                    except BatchError as err:
                        with err_lock:
                            errors.append(err)
                        stop.set()
                        return

        threads = [threading.Thread(target=worker, name=f"waveseq-batch-{t}")
                   for t in range(min(workers, len(chunks)))]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        if errors:
            raise min(errors, key=lambda e: e.pair_index)
    wall = time.perf_counter() - t0
    total = 0
    for qi, si in job.pairs:
        total += len(job.queries[qi]) * len(job.subjects[si])
    return BatchReport(results=results, wall_time=wall, total_cells=total)
