"""FASTA ingestion, TSV result output, and a seeded read simulator."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ALPHABET,
    AlignmentResult,
    ParseError,
    Sequence,
    decode_sequence,
    encode_sequence,
)

FASTA_WIDTH = 60

TSV_HEADER = ("query_id", "subject_id", "score",
              "q_start", "q_end", "s_start", "s_end", "cigar")


def read_fasta(path: str | os.PathLike) -> list[Sequence]:
    """Parse a FASTA file into Sequences, in file order.

    Multi-line bodies are concatenated, lowercase is accepted, and non-ACGT
    symbols are kept but flagged (they score as mismatches downstream).
    Malformed headers and empty records raise ParseError with the line
    number where the problem became evident.
    """
    records: list[Sequence] = []
    header: str | None = None
    header_line = 0
    body: list[str] = []

    def flush(at_line: int) -> None:
        nonlocal header, body
        if header is None:
            return
        text = "".join(body)
        if not text:
            raise ParseError(f"record {header!r} has an empty body", at_line)
        records.append(encode_sequence(header, text))
        header, body = None, []

    with open(path, "r", encoding="utf-8") as fh:
        lineno = 0
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith(">"):
                flush(lineno)
                header = line[1:].split()[0] if len(line) > 1 else ""
                if not header:
                    raise ParseError("header has no id", lineno)
                header_line = lineno
                body = []
            else:
                if header is None:
                    raise ParseError("sequence data before any header", lineno)
                body.append(line)
        flush(header_line if header is not None else lineno)
    return records


def write_fasta(seqs: list[Sequence], path: str | os.PathLike,
                width: int = FASTA_WIDTH) -> None:
    """Write sequences in canonical FASTA form (ids as headers, wrapped bodies)."""
    with open(path, "w", encoding="utf-8") as fh:
        for seq in seqs:
            fh.write(f">{seq.id}\n")
            text = decode_sequence(seq)
            for i in range(0, len(text), width):
                fh.write(text[i:i + width] + "\n")


def cigar_string(result: AlignmentResult) -> str:
    """Run-length CIGAR (M/I/D, I consumes query); empty when ops is None."""
    if not result.ops:
        return ""
    parts: list[str] = []
    last_op, last_n = result.ops[0]
    for op, n in result.ops[1:]:
        if n == 0:
            continue
        if op == last_op:
            last_n += n
        else:
            parts.append(f"{last_n}{last_op}")
            last_op, last_n = op, n
    parts.append(f"{last_n}{last_op}")
    return "".join(parts)


def write_results_tsv(rows, path: str | os.PathLike) -> None:
    """Write one TSV row per aligned pair, with a header row.

    rows yields (query_id, subject_id, AlignmentResult). The cigar column is
    empty for score-only results.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TSV_HEADER) + "\n")
        for qid, sid, r in rows:
            fh.write("\t".join((qid, sid, str(r.score),
                                str(r.q_start), str(r.q_end),
                                str(r.s_start), str(r.s_end),
                                cigar_string(r))) + "\n")


@dataclass(frozen=True)
class SimSpec:
    """Parameters for the mutation-based read simulator."""

    count: int
    read_len: int
    sub_rate: float = 0.0
    ins_rate: float = 0.0
    del_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.read_len < 1:
            raise ValueError("read_len must be positive")
        for name in ("sub_rate", "ins_rate", "del_rate"):
            r = getattr(self, name)
            if not 0.0 <= r < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.sub_rate + self.ins_rate + self.del_rate >= 1.0:
            raise ValueError("mutation rates must sum below 1")


@dataclass
class SimStats:
    """Event counters from one simulate_reads call; the denominators for rate checks."""

    symbols: int = 0
    substitutions: int = 0
    insertions: int = 0
    deletions: int = 0


def simulate_reads(genome: Sequence, spec: SimSpec,
                   stats: SimStats | None = None) -> list[Sequence]:
    """Sample reads from uniform genome starts and apply per-symbol mutations.

    Each window symbol independently resolves to a deletion, an insertion of
    a random base followed by the original symbol, a substitution with a
    different base, or a plain copy, using one RNG draw so the events are
    mutually exclusive. Deterministic under spec.seed. Read ids record the
    ground-truth origin as <name>_<index>_at<start> (forward strand only).
    """
    if spec.read_len > len(genome):
        raise ValueError(
            f"read_len {spec.read_len} exceeds genome length {len(genome)}")
    rng = np.random.default_rng(spec.seed)
    text = decode_sequence(genome)
    del_hi = spec.del_rate
    ins_hi = del_hi + spec.ins_rate
    sub_hi = ins_hi + spec.sub_rate
    reads: list[Sequence] = []
    for idx in range(spec.count):
        start = int(rng.integers(0, len(genome) - spec.read_len + 1))
        window = text[start:start + spec.read_len]
        out: list[str] = []
        for ch in window:
            if stats is not None:
                stats.symbols += 1
            u = rng.random()
            if u < del_hi:
                if stats is not None:
                    stats.deletions += 1
                continue
            if u < ins_hi:
                if stats is not None:
                    stats.insertions += 1
                out.append(ALPHABET[int(rng.integers(0, 4))])
                out.append(ch)
                continue
            if u < sub_hi:
                if stats is not None:
                    stats.substitutions += 1
                # pick among the 3 other bases; works for flagged symbols too
                others = [b for b in ALPHABET if b != ch]
                out.append(others[int(rng.integers(0, len(others)))])
                continue
            out.append(ch)
        if not out:
            # an all-deleted window would make an empty record; keep one base
            out.append(window[0])
        reads.append(encode_sequence(f"{genome.id}_{idx}_at{start}", "".join(out)))
    return reads
