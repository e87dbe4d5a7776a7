"""Core types for batched pairwise DNA alignment: sequences, scoring, configs, results."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

ALPHABET = "ACGT"
CODE_OF = {"A": 0, "C": 1, "G": 2, "T": 3}

# Sentinel for "minus infinity" scores. Chosen so that sentinel +/- any
# per-step term stays far from int32 wraparound for all supported lengths.
NEG_INF = -(2 ** 30)

ALIGN_TYPES = ("local", "global", "semiglobal")
GAP_MODELS = ("linear", "affine")
RESULT_MODES = ("score_only", "traceback")


class WaveseqError(Exception):
    """Base class for all library errors."""


class EmptySequence(WaveseqError):
    pass


class ConfigMismatch(WaveseqError):
    pass


class LengthOverflow(WaveseqError):
    pass


class ChunkOverflow(WaveseqError):
    pass


class PackedRangeOverflow(WaveseqError):
    pass


class ParseError(WaveseqError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BatchError(WaveseqError):
    def __init__(self, pair_index: int, cause: BaseException):
        super().__init__(f"pair {pair_index} failed: {cause!r}")
        self.pair_index = pair_index
        self.cause = cause


class UseHirschberg(WaveseqError):
    """Signals that a subproblem is too large for the explicit predecessor matrix."""


@dataclass
class Sequence:
    """A DNA sequence as 2-bit symbol codes plus a non-ACGT side channel.

    codes holds one value in {0,1,2,3} per symbol; flags marks positions whose
    input symbol was outside ACGT (coded 0, always scored as mismatch).
    """

    id: str
    codes: np.ndarray
    flags: np.ndarray

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def data(self) -> bytes:
        """Symbol codes packed 4 per byte, 2 bits each, low bits first."""
        n = len(self)
        padded = np.zeros((n + 3) // 4 * 4, np.uint8)
        padded[:n] = self.codes
        grouped = padded.reshape(-1, 4)
        packed = (grouped[:, 0] | (grouped[:, 1] << 2)
                  | (grouped[:, 2] << 4) | (grouped[:, 3] << 6))
        return packed.astype(np.uint8).tobytes()

    @property
    def has_ambiguous(self) -> bool:
        return bool(self.flags.any())

    def window(self, start: int, stop: int) -> "Sequence":
        """Zero-copy view of symbols [start, stop)."""
        return Sequence(self.id, self.codes[start:stop], self.flags[start:stop])

    def reversed_copy(self) -> "Sequence":
        return Sequence(self.id, self.codes[::-1].copy(), self.flags[::-1].copy())


def encode_sequence(seq_id: str, text: str) -> Sequence:
    """Encode a nucleotide string, case-insensitive; non-ACGT symbols get code 0 and a flag."""
    if len(text) == 0:
        raise EmptySequence(f"sequence {seq_id!r} is empty")
    up = text.upper()
    codes = np.zeros(len(up), np.uint8)
    flags = np.zeros(len(up), bool)
    for i, ch in enumerate(up):
        code = CODE_OF.get(ch)
        if code is None:
            flags[i] = True
        else:
            codes[i] = code
    return Sequence(seq_id, codes, flags)


def decode_sequence(seq: Sequence) -> str:
    return "".join("N" if f else ALPHABET[c] for c, f in zip(seq.codes, seq.flags))


@dataclass(frozen=True)
class ScoringScheme:
    """Match/mismatch scores and gap penalties (alpha = first gap symbol, beta = extension)."""

    match_score: int = 2
    mismatch_score: int = -1
    gap_open: int = 2
    gap_extend: int = 1
    gap_model: str = "affine"

    def __post_init__(self):
        if self.gap_model not in GAP_MODELS:
            raise ConfigMismatch(f"unknown gap model {self.gap_model!r}")
        if self.gap_open < 0 or self.gap_extend < 0:
            raise ConfigMismatch("gap penalties must be non-negative")
        if self.gap_model == "affine" and self.gap_extend > self.gap_open:
            warnings.warn("gap_extend exceeds gap_open; gaps get cheaper as they grow",
                          stacklevel=2)

    @property
    def max_step(self) -> int:
        """Largest per-step score magnitude; bounds any path score by max_step*(m+n)."""
        return max(abs(self.match_score), abs(self.mismatch_score),
                   self.gap_open, self.gap_extend, 1)


def substitution_score(scheme: ScoringScheme, a: int, b: int,
                       a_flagged: bool = False, b_flagged: bool = False) -> int:
    if a_flagged or b_flagged:
        return scheme.mismatch_score
    return scheme.match_score if a == b else scheme.mismatch_score


def gap_cost(scheme: ScoringScheme, length: int) -> int:
    """Penalty (positive) of one maximal gap run of the given length."""
    if length <= 0:
        return 0
    if scheme.gap_model == "linear":
        return scheme.gap_open * length
    return scheme.gap_open + (length - 1) * scheme.gap_extend


@dataclass(frozen=True)
class AlignConfig:
    align_type: str = "global"
    gap_model: str = "affine"
    result_mode: str = "score_only"
    nu: int = field(default=NEG_INF)


def validate_config(cfg: AlignConfig, scheme: ScoringScheme) -> AlignConfig:
    """Check cfg against the scheme and return a copy with nu normalized."""
    if cfg.align_type not in ALIGN_TYPES:
        raise ConfigMismatch(f"unknown align type {cfg.align_type!r}")
    if cfg.gap_model not in GAP_MODELS:
        raise ConfigMismatch(f"unknown gap model {cfg.gap_model!r}")
    if cfg.result_mode not in RESULT_MODES:
        raise ConfigMismatch(f"unknown result mode {cfg.result_mode!r}")
    if cfg.gap_model != scheme.gap_model:
        raise ConfigMismatch(
            f"config gap model {cfg.gap_model!r} != scheme gap model {scheme.gap_model!r}")
    nu = 0 if cfg.align_type == "local" else NEG_INF
    return AlignConfig(cfg.align_type, cfg.gap_model, cfg.result_mode, nu)


# Any DP value is bounded by max_step*(m+n); keep that comfortably away from
# the int32 sentinel so NEG_INF arithmetic can never wrap.
_SCORE_HEADROOM = 2 ** 29


def check_length_bounds(m: int, n: int, scheme: ScoringScheme) -> None:
    if scheme.max_step * (m + n) >= _SCORE_HEADROOM:
        raise LengthOverflow(
            f"m+n = {m + n} exceeds the supported bound "
            f"{_SCORE_HEADROOM // scheme.max_step} for this scheme")


@dataclass
class AlignmentResult:
    """Alignment outcome; ops is None in score-only mode.

    ops is a run-length list like [("M", 4), ("I", 1)]; M consumes both
    sequences (match or mismatch), I consumes query only, D subject only.
    Coordinates are half-open 0-based spans of the aligned cores.
    """

    score: int
    q_start: int
    q_end: int
    s_start: int
    s_end: int
    ops: list[tuple[str, int]] | None = None
    cells_computed: int = 0


def merge_ops(ops: list[tuple[str, int]]) -> list[tuple[str, int]]:
    """Collapse adjacent runs of the same op; drop zero-length runs."""
    out: list[tuple[str, int]] = []
    for op, n in ops:
        if n == 0:
            continue
        if out and out[-1][0] == op:
            out[-1] = (op, out[-1][1] + n)
        else:
            out.append((op, n))
    return out


def rescore_alignment(result: AlignmentResult, query: Sequence, subject: Sequence,
                      scheme: ScoringScheme) -> int:
    """Recompute the score of result.ops from scratch; the arbiter for traceback checks."""
    if result.ops is None:
        raise ValueError("cannot re-score a score-only result")
    qi, sj = result.q_start, result.s_start
    total = 0
    for op, n in result.ops:
        if op == "M":
            for _ in range(n):
                total += substitution_score(scheme, int(query.codes[qi]), int(subject.codes[sj]),
                                            bool(query.flags[qi]), bool(subject.flags[sj]))
                qi += 1
                sj += 1
        elif op == "I":
            total -= gap_cost(scheme, n)
            qi += n
        elif op == "D":
            total -= gap_cost(scheme, n)
            sj += n
        else:
            raise ValueError(f"unknown op {op!r}")
    if qi != result.q_end or sj != result.s_end:
        raise ValueError("ops do not span the recorded coordinates")
    return total
