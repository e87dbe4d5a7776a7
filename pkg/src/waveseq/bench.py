"""Throughput measurement (GCUPS) and theoretical-peak accounting."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .batch import BatchJob, run_batch


@dataclass(frozen=True)
class HardwareModel:
    """Peak-rate inputs: scalar unit count, boost clock, and cycles per cell.

    cores counts the scalar ALU/FP units doing cell updates (for a CPU:
    physical cores times SIMD lanes). The canonical affine kernel needs 7
    cycles per cell unpacked (4 max + 3 add/sub) and 3.5 packed, two cells
    per 32-bit op.
    """

    cores: float
    clock_ghz: float
    cycles_per_cell: float

    def __post_init__(self):
        if self.cores <= 0 or self.clock_ghz <= 0 or self.cycles_per_cell <= 0:
            raise ValueError("hardware model fields must all be positive")


def theoretical_peak(hw: HardwareModel) -> float:
    """Maximum attainable GCUPS: cores * clock / cycles_per_cell (clock in GHz)."""
    return hw.cores * hw.clock_ghz / hw.cycles_per_cell


def median_rate(values: list[float]) -> float:
    """Median with the even-count rule: mean of the two middle sorted values."""
    if not values:
        raise ValueError("median of an empty list")
    s = sorted(values)
    h = len(s) // 2
    if len(s) % 2:
        return s[h]
    return 0.5 * (s[h - 1] + s[h])


MEDIAN_RULE = "mean of the two middle values of the sorted run speeds"


@dataclass
class BenchReport:
    """Measured throughput next to the model's ceiling.

    cells counts score cells only (sum of m*n over pairs); extra_cells is
    what traceback re-passes added on top. wall_s is derived from the median
    rate so achieved_gcups stays recomputable as cells / wall_s / 1e9.
    """

    achieved_gcups: float
    tpp_gcups: float | None
    efficiency: float | None
    cells: int
    extra_cells: int
    wall_s: float
    repetitions: int
    workload: str
    median_rule: str = MEDIAN_RULE

    def to_json(self) -> str:
        doc = {
            "achieved_gcups": self.achieved_gcups,
            "tpp_gcups": self.tpp_gcups,
            "efficiency": self.efficiency,
            "cells": self.cells,
            "extra_cells": self.extra_cells,
            "wall_s": self.wall_s,
            "repetitions": self.repetitions,
            "workload": self.workload,
            "median_rule": self.median_rule,
        }
        return json.dumps(doc, indent=2)


def measure_gcups(job: BatchJob, repetitions: int,
                  hw: HardwareModel | None = None) -> BenchReport:
    """Run the job `repetitions` times and report the median GCUPS.

    Timing covers alignment only; parsing and writing happen outside. The
    efficiency fields are filled when a hardware model is supplied.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    rates: list[float] = []
    last = None
    for _ in range(repetitions):
        last = run_batch(job)
        rates.append(last.gcups)
    achieved = median_rate(rates)
    cells = last.total_cells
    extra = 0
    if job.cfg.result_mode == "traceback":
        extra = sum(r.cells_computed for r in last.results) - cells
    tpp = theoretical_peak(hw) if hw is not None else None
    eff = achieved / tpp if tpp else None
    workload = (f"{len(job.pairs)} pairs, {job.cfg.align_type}/"
                f"{job.scheme.gap_model}, {job.cfg.result_mode}")
    return BenchReport(
        achieved_gcups=achieved,
        tpp_gcups=tpp,
        efficiency=eff,
        cells=cells,
        extra_cells=extra,
        wall_s=cells / achieved / 1e9 if achieved > 0 else 0.0,
        repetitions=repetitions,
        workload=workload,
    )
