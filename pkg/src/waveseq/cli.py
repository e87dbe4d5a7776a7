"""Command-line surface: align, bench, simulate, selftest.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .batch import BatchJob, all_pairs, run_batch
from .bench import HardwareModel, measure_gcups
from .core import (
    AlignConfig,
    ScoringScheme,
    Sequence,
    WaveseqError,
    decode_sequence,
    encode_sequence,
    validate_config,
)
from .engine import EngineTuning, engine_score
from .io import SimSpec, read_fasta, simulate_reads, write_fasta, write_results_tsv
from .refdp import ref_score

# selftest scores through this hook so fault-injection tests can swap in a
# broken engine and watch the negative path
_SELFTEST_ENGINE = engine_score


class UsageError(Exception):
    """Flag combinations argparse cannot reject on its own."""


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _add_scoring_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--type", choices=("local", "global", "semiglobal"),
                     default="global", help="alignment type (default global)")
    sub.add_argument("--gaps", choices=("linear", "affine"), default="affine",
                     help="gap model (default affine)")
    sub.add_argument("--match", type=int, default=2)
    sub.add_argument("--mismatch", type=int, default=-1)
    sub.add_argument("--gap-open", type=int, default=2,
                     help="first gap symbol cost (also the per-symbol linear cost)")
    sub.add_argument("--gap-extend", type=int, default=None,
                     help="gap extension cost (affine only; default 1)")


def _add_pair_flags(sub: argparse.ArgumentParser, subjects_required: bool) -> None:
    sub.add_argument("--queries", required=True, help="query FASTA file")
    sub.add_argument("--subjects", required=subjects_required,
                     help="subject FASTA file" +
                          ("" if subjects_required else " (default: the queries file)"))
    grp = sub.add_mutually_exclusive_group(required=True)
    grp.add_argument("--all-pairs", action="store_true",
                     help="align every query against every subject")
    grp.add_argument("--pairs", help="file of query_id<TAB>subject_id lines")


def _add_tuning_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--lanes", type=int, default=None,
                     help="lanes per group (default: auto from lengths)")
    sub.add_argument("--cols-per-lane", type=int, default=None,
                     help="matrix columns per lane (default: auto)")
    sub.add_argument("--packed", action="store_true",
                     help="pack two 16-bit problems per lane in score-only mode")
    sub.add_argument("--workers", type=int, default=0,
                     help="worker threads (default: WAVESEQ_WORKERS or CPU count)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waveseq",
        description="Batched pairwise DNA alignment on a lane-group wavefront engine")
    subs = parser.add_subparsers(dest="command", required=True)

    p_align = subs.add_parser("align", help="align sequence pairs to a TSV file")
    _add_pair_flags(p_align, subjects_required=True)
    _add_scoring_flags(p_align)
    _add_tuning_flags(p_align)
    p_align.add_argument("--traceback", action="store_true",
                         help="recover operations (CIGAR column) as well as scores")
    p_align.add_argument("--out", required=True, help="output TSV path")
    p_align.set_defaults(func=cmd_align)

    p_bench = subs.add_parser("bench", help="measure throughput in GCUPS")
    _add_pair_flags(p_bench, subjects_required=False)
    _add_scoring_flags(p_bench)
    _add_tuning_flags(p_bench)
    p_bench.add_argument("--reps", type=_positive_int, default=10,
                         help="repetitions for the median rule (default 10)")
    p_bench.add_argument("--cores", type=float, default=None,
                         help="hardware model: scalar units (cores x SIMD lanes)")
    p_bench.add_argument("--clock", type=float, default=None,
                         help="hardware model: sustained clock in GHz")
    p_bench.add_argument("--cycles", type=float, default=None,
                         help="hardware model: cycles per cell update")
    p_bench.set_defaults(func=cmd_bench)

    p_sim = subs.add_parser("simulate", help="sample mutated reads from a genome")
    p_sim.add_argument("--genome", required=True,
                       help="FASTA file; the first record is the genome")
    p_sim.add_argument("--count", type=_positive_int, required=True)
    p_sim.add_argument("--read-len", type=_positive_int, required=True)
    p_sim.add_argument("--sub-rate", type=float, default=0.0)
    p_sim.add_argument("--ins-rate", type=float, default=0.0)
    p_sim.add_argument("--del-rate", type=float, default=0.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="output FASTA path")
    p_sim.set_defaults(func=cmd_simulate)

    p_self = subs.add_parser("selftest",
                             help="randomized equivalence check against the reference DP")
    p_self.add_argument("--seed", type=int, default=0)
    p_self.add_argument("--cases", type=_positive_int, default=500)
    p_self.set_defaults(func=cmd_selftest)
    return parser


def _build_scheme(args) -> ScoringScheme:
    extend = args.gap_extend
    if args.gaps == "linear":
        # linear charges gap_open per symbol; the extend field is unused and
        # mirrors it so gap_cost stays well defined
        extend = args.gap_open
    elif extend is None:
        extend = 1
    return ScoringScheme(match_score=args.match, mismatch_score=args.mismatch,
                         gap_open=args.gap_open, gap_extend=extend,
                         gap_model=args.gaps)


def _build_tuning(args) -> EngineTuning | None:
    if args.lanes is None and args.cols_per_lane is None and not args.packed:
        return None
    lanes = args.lanes if args.lanes is not None else 32
    cols = args.cols_per_lane if args.cols_per_lane is not None else 4
    try:
        return EngineTuning(lanes=lanes, cols_per_lane=cols, packed=args.packed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load_pairs(args, queries: list[Sequence],
                subjects: list[Sequence]) -> list[tuple[int, int]]:
    if args.all_pairs:
        return all_pairs(queries, subjects)

    def index_of(seqs: list[Sequence], label: str) -> dict[str, int]:
        table: dict[str, int] = {}
        for i, seq in enumerate(seqs):
            if seq.id in table:
                raise WaveseqError(
                    f"duplicate {label} id {seq.id!r}; --pairs needs unique ids")
            table[seq.id] = i
        return table

    qidx = index_of(queries, "query")
    sidx = index_of(subjects, "subject")
    pairs: list[tuple[int, int]] = []
    with open(args.pairs, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise WaveseqError(
                    f"{args.pairs}:{lineno}: expected 'query_id subject_id'")
            qid, sid = parts
            if qid not in qidx:
                raise WaveseqError(f"{args.pairs}:{lineno}: unknown query id {qid!r}")
            if sid not in sidx:
                raise WaveseqError(f"{args.pairs}:{lineno}: unknown subject id {sid!r}")
            pairs.append((qidx[qid], sidx[sid]))
    if not pairs:
        raise WaveseqError(f"{args.pairs} lists no pairs")
    return pairs


def _build_job(args, result_mode: str) -> tuple[BatchJob, list[Sequence], list[Sequence]]:
    queries = read_fasta(args.queries)
    if getattr(args, "subjects", None):
        subjects = read_fasta(args.subjects)
    else:
        subjects = queries
    scheme = _build_scheme(args)
    cfg = validate_config(
        AlignConfig(align_type=args.type, gap_model=args.gaps,
                    result_mode=result_mode), scheme)
    pairs = _load_pairs(args, queries, subjects)
    job = BatchJob(queries=queries, subjects=subjects, pairs=pairs,
                   cfg=cfg, scheme=scheme, tuning=_build_tuning(args),
                   workers=args.workers)
    return job, queries, subjects


def cmd_align(args) -> int:
    mode = "traceback" if args.traceback else "score_only"
    job, queries, subjects = _build_job(args, mode)
    report = run_batch(job)
    rows = ((queries[qi].id, subjects[si].id, res)
            for (qi, si), res in zip(job.pairs, report.results))
    write_results_tsv(rows, args.out)
    return 0


def cmd_bench(args) -> int:
    given = (args.cores is not None, args.clock is not None, args.cycles is not None)
    if any(given) and not all(given):
        raise UsageError("--cores, --clock and --cycles must be given together")
    hw = None
    if all(given):
        try:
            hw = HardwareModel(args.cores, args.clock, args.cycles)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    job, _, _ = _build_job(args, "score_only")
    report = measure_gcups(job, args.reps, hw)
    print(report.to_json())
    return 0


def cmd_simulate(args) -> int:
    for name in ("sub_rate", "ins_rate", "del_rate"):
        rate = getattr(args, name)
        if not 0.0 <= rate < 1.0:
            raise UsageError(f"--{name.replace('_', '-')} must lie in [0, 1)")
    if args.sub_rate + args.ins_rate + args.del_rate >= 1.0:
        raise UsageError("mutation rates must sum below 1")
    genome = read_fasta(args.genome)[0]
    spec = SimSpec(count=args.count, read_len=args.read_len,
                   sub_rate=args.sub_rate, ins_rate=args.ins_rate,
                   del_rate=args.del_rate, seed=args.seed)
    try:
        reads = simulate_reads(genome, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_fasta(reads, args.out)
    return 0


_SELFTEST_SCHEMES = (
    ScoringScheme(2, -1, 2, 1, "affine"),
    ScoringScheme(3, -2, 5, 2, "affine"),
    ScoringScheme(1, -3, 2, 2, "affine"),
    ScoringScheme(2, -1, 1, 1, "linear"),
    ScoringScheme(1, -1, 3, 3, "linear"),
)
_SELFTEST_TYPES = ("global", "local", "semiglobal")
_SELFTEST_LANES = (4, 8, 16, 32)
_SELFTEST_COLS = (1, 2, 4)


def cmd_selftest(args) -> int:
    rng = np.random.default_rng(args.seed)
    alphabet = np.array(list("ACGT"))
    for case in range(args.cases):
        m = int(rng.integers(1, 121))
        n = int(rng.integers(1, 121))
        q = encode_sequence("q", "".join(alphabet[rng.integers(0, 4, m)]))
        s = encode_sequence("s", "".join(alphabet[rng.integers(0, 4, n)]))
        scheme = _SELFTEST_SCHEMES[int(rng.integers(0, len(_SELFTEST_SCHEMES)))]
        atype = _SELFTEST_TYPES[int(rng.integers(0, 3))]
        cfg = AlignConfig(align_type=atype, gap_model=scheme.gap_model,
                          result_mode="score_only")
        tuning = EngineTuning(
            lanes=_SELFTEST_LANES[int(rng.integers(0, len(_SELFTEST_LANES)))],
            cols_per_lane=_SELFTEST_COLS[int(rng.integers(0, len(_SELFTEST_COLS)))])
        got_score, got_end, _ = _SELFTEST_ENGINE(q, s, cfg, scheme, tuning)
        want_score, want_end = ref_score(q, s, cfg, scheme)
        if got_score != want_score or tuple(got_end) != tuple(want_end):
            blob = {
                "case": case,
                "seed": args.seed,
                "query": decode_sequence(q),
                "subject": decode_sequence(s),
                "align_type": atype,
                "gap_model": scheme.gap_model,
                "scheme": [scheme.match_score, scheme.mismatch_score,
                           scheme.gap_open, scheme.gap_extend],
                "lanes": tuning.lanes,
                "cols_per_lane": tuning.cols_per_lane,
                "engine": [got_score, list(got_end)],
                "reference": [want_score, list(want_end)],
            }
            print(f"FAIL at case {case}: engine {got_score} at {got_end}, "
                  f"reference {want_score} at {want_end}", file=sys.stderr)
            print(json.dumps(blob), file=sys.stderr)
            return 1
    print(f"{args.cases}/{args.cases} ok")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (WaveseqError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def cli() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    cli()
