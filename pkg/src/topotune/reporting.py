"""Aggregation of trial logs into summary rows and convergence curves.

Summaries use the population standard deviation (n divisor) so that golden
files are stable, and every statistic is a pure function of the raw logs --
an independent recomputation from the JSONL files must reproduce the emitted
numbers exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .logs import TrialRecord


@dataclass
class SummaryRow:
    """Per-(algorithm, space) statistics over a set of seeded runs."""

    algorithm: str
    space_id: str
    runs: int
    mean_best: float
    std_best: float
    mean_trials_to_95pct: float
    mean_elapsed_ms: float


def trials_to_fraction(records: Sequence[TrialRecord], fraction: float = 0.95) -> int:
    """First trial index whose running best reaches ``fraction`` of the final best."""
    if not records:
        raise ValueError("empty trial log")
    threshold = fraction * records[-1].best_so_far
    for rec in records:
        if rec.best_so_far >= threshold:
            return rec.trial
    return records[-1].trial


def summarize(
    algorithm: str, space_id: str, logs: Sequence[Sequence[TrialRecord]]
) -> SummaryRow:
    if not logs:
        raise ValueError("need at least one run to summarize")
    bests = np.array([log[-1].best_so_far for log in logs])
    t95 = np.array([trials_to_fraction(log) for log in logs], dtype=float)
    elapsed = np.array([log[-1].elapsed_ms for log in logs])
    return SummaryRow(
        algorithm=algorithm,
        space_id=space_id,
        runs=len(logs),
        mean_best=float(np.mean(bests)),
        std_best=float(np.std(bests)),
        mean_trials_to_95pct=float(np.mean(t95)),
        mean_elapsed_ms=float(np.mean(elapsed)),
    )


def best_curve(records: Sequence[TrialRecord], budget: int) -> np.ndarray:
    """Running best padded (with its final value) out to ``budget`` entries."""
    curve = np.empty(budget)
    last = 0.0
    for i in range(budget):
        if i < len(records):
            last = records[i].best_so_far
        curve[i] = last
    return curve


def curve_rows(
    algorithm: str, logs: Sequence[Sequence[TrialRecord]], budget: int
) -> list[tuple[str, int, float, float]]:
    """Per-trial (algorithm, trial, mean best, std best) across runs."""
    stacked = np.stack([best_curve(log, budget) for log in logs])
    means = stacked.mean(axis=0)
    stds = stacked.std(axis=0)
    return [
        (algorithm, t + 1, float(means[t]), float(stds[t]))
        for t in range(budget)
    ]


def write_summary_csv(path: str, rows: Sequence[dict]) -> None:
    """Rows are dicts sharing a key set; column order follows the first row."""
    if not rows:
        raise ValueError("no summary rows to write")
    fieldnames = list(rows[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def summary_row_dict(row: SummaryRow, **extra) -> dict:
    out = dict(extra)
    out.update(
        algorithm=row.algorithm,
        space_id=row.space_id,
        runs=row.runs,
        mean_best=repr(row.mean_best),
        std_best=repr(row.std_best),
        mean_trials_to_95pct=repr(row.mean_trials_to_95pct),
        mean_elapsed_ms=repr(row.mean_elapsed_ms),
    )
    return out


def write_curves_csv(path: str, rows: Sequence[tuple[str, int, float, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "trial", "mean_best", "std_best"])
        for algorithm, trial, mean_best, std_best in rows:
            writer.writerow([algorithm, trial, repr(mean_best), repr(std_best)])
