"""Trial logs shared by every optimizer: one record per objective evaluation.

Records serialize as JSON Lines with a fixed key order, so two seeded runs
produce byte-identical logs apart from the ``elapsed_ms`` timestamps.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Any

from .spaces import SearchSpace

_FIELDS = ("trial", "config", "fitness", "best_so_far", "elapsed_ms")


@dataclass
class TrialRecord:
    trial: int
    config: dict[str, Any]
    fitness: float
    best_so_far: float
    elapsed_ms: float

    def to_json(self) -> str:
        return json.dumps({k: getattr(self, k) for k in _FIELDS})

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        obj = json.loads(line)
        return cls(**{k: obj[k] for k in _FIELDS})


@dataclass(frozen=True)
class Individual:
    """An evaluated configuration; fitness 0 marks an invalid evaluation."""

    config: tuple
    fitness: float


class TrialRecorder:
    """Builds a trial log incrementally and tracks the best individual.

    Ties keep the earliest recorded individual, matching the archive
    semantics of the evolutionary engine.
    """

    def __init__(self, space: SearchSpace) -> None:
        self._space = space
        self.records: list[TrialRecord] = []
        self.best: Individual | None = None
        self._t0 = time.perf_counter()

    def record(self, config: tuple, fitness: float) -> TrialRecord:
        fitness = float(fitness)
        if self.best is None or fitness > self.best.fitness:
            self.best = Individual(config, fitness)
        best_value = max(self.best.fitness, 0.0)
        rec = TrialRecord(
            trial=len(self.records) + 1,
            config=self._space.config_to_json(config),
            fitness=fitness,
            best_so_far=best_value,
            elapsed_ms=(time.perf_counter() - self._t0) * 1000.0,
        )
        self.records.append(rec)
        return rec


def write_trial_log(path: str, records: list[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_trial_log(path: str) -> list[TrialRecord]:
    with open(path, encoding="utf-8") as fh:
        return [TrialRecord.from_json(line) for line in fh if line.strip()]
