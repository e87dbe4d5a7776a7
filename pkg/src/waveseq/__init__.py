"""Batched pairwise DNA alignment on lane-group wavefronts."""

from .core import (
    ALPHABET,
    NEG_INF,
    AlignConfig,
    AlignmentResult,
    BatchError,
    ChunkOverflow,
    ConfigMismatch,
    EmptySequence,
    LengthOverflow,
    PackedRangeOverflow,
    ParseError,
    ScoringScheme,
    Sequence,
    UseHirschberg,
    WaveseqError,
    check_length_bounds,
    decode_sequence,
    encode_sequence,
    gap_cost,
    merge_ops,
    rescore_alignment,
    substitution_score,
    validate_config,
)
from .engine import (
    EngineStats,
    EngineTuning,
    ScoringProfile,
    StageBoundary,
    StageOutputs,
    auto_tuning,
    build_scoring_profile,
    engine_score,
    engine_score_packed,
    lane_shift_down,
    lane_shift_up,
    merged_state_exact,
    packed_range_ok,
    wavefront_stage,
)
from .refdp import ref_score, ref_traceback
from .traceback import (
    T_EXPLICIT,
    AllocationMeter,
    align_traceback,
    explicit_traceback,
    hirschberg,
    locate_endpoints,
)
from .batch import (
    BatchJob,
    BatchReport,
    all_pairs,
    resolve_workers,
    run_batch,
)
from .bench import (
    BenchReport,
    HardwareModel,
    measure_gcups,
    median_rate,
    theoretical_peak,
)
from .io import (
    SimSpec,
    SimStats,
    cigar_string,
    read_fasta,
    simulate_reads,
    write_fasta,
    write_results_tsv,
)

__version__ = "0.1.0"


def align(query, subject, align_type: str = "global", scheme: ScoringScheme | None = None,
          traceback: bool = True) -> AlignmentResult:
    """One-call alignment of two sequences given as strings or Sequences."""
    if isinstance(query, str):
        query = encode_sequence("query", query)
    if isinstance(subject, str):
        subject = encode_sequence("subject", subject)
    if scheme is None:
        scheme = ScoringScheme()
    cfg = AlignConfig(align_type=align_type, gap_model=scheme.gap_model,
                      result_mode="traceback" if traceback else "score_only")
    if traceback:
        return align_traceback(query, subject, cfg, scheme)
    score, end, cells = engine_score(query, subject, cfg, scheme)
    if cfg.align_type == "global":
        return AlignmentResult(score=score, q_start=0, q_end=len(query),
                               s_start=0, s_end=len(subject), ops=None,
                               cells_computed=cells)
    return AlignmentResult(score=score, q_start=end[0], q_end=end[0],
                           s_start=end[1], s_end=end[1], ops=None,
                           cells_computed=cells)
