"""The OpEvo evolutionary core, exposed through an ask/tell protocol.

The engine proposes batches of novel configurations (``ask``) and the caller
reports their fitnesses (``tell``), so evaluation can be batched, remoted, or
parallelized without touching the search logic.  Internally it keeps a
deduplicating archive of everything evaluated, selects the top-ranked
individuals as parents, recombines them with per-parameter
fitness-proportional inheritance, and mutates each child parameter with a
killed random walk over its topology.

No configuration is ever proposed twice.  When mutation keeps landing on
known configurations, the engine re-mutates up to a retry cap, then
substitutes a uniformly random unvisited configuration, and finally signals
exhaustion once the whole space has been evaluated.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .logs import Individual, TrialRecord, TrialRecorder
from .spaces import SearchSpace, sample_unvisited
from .walk import check_rate, sample_walk


class ProtocolError(RuntimeError):
    """Violation of the ask/tell contract (ordering, membership, fitness sign)."""


class FatalEvaluationError(RuntimeError):
    """An objective failure that must abort the run instead of scoring 0.

    Raised (or subclassed) by objectives whose failure means no configuration
    can ever be evaluated -- e.g. a missing evaluator program -- as opposed to
    one configuration failing to evaluate.
    """


@dataclass
class EngineConfig:
    """All knobs of the evolutionary loop.

    ``parents`` is the selection width, ``offspring`` the batch size per
    generation, ``mutation_rate`` the walk continuation probability, and
    ``budget`` the total number of evaluations the engine will propose.
    """

    parents: int = 8
    offspring: int = 8
    mutation_rate: float = 0.5
    budget: int = 500
    seed: int = 0
    retry_cap: int = 64

    def __post_init__(self) -> None:
        if not (isinstance(self.parents, int) and self.parents >= 1):
            raise ValueError(f"parents must be a positive integer, got {self.parents}")
        if not (isinstance(self.offspring, int) and self.offspring >= 1):
            raise ValueError(f"offspring must be a positive integer, got {self.offspring}")
        check_rate(self.mutation_rate)
        if not (isinstance(self.budget, int) and self.budget >= 1):
            raise ValueError(f"budget must be a positive integer, got {self.budget}")
        if not (isinstance(self.retry_cap, int) and self.retry_cap >= 1):
            raise ValueError(f"retry_cap must be a positive integer, got {self.retry_cap}")


class Archive:
    """Every evaluated individual, ranked by decreasing fitness.

    Ties keep insertion order, which makes parent selection and ``best``
    deterministic.  Membership is indexed by configuration, and duplicate
    configurations are rejected.
    """

    def __init__(self) -> None:
        self._ranked: list[Individual] = []
        self._neg_fitness: list[float] = []  # parallel sort keys for bisect
        self._by_config: dict[tuple, Individual] = {}
        self._insertion: list[Individual] = []

    def __len__(self) -> int:
        return len(self._ranked)

    def __contains__(self, config: tuple) -> bool:
        return config in self._by_config

    def __iter__(self):
        return iter(self._insertion)

    def add(self, individual: Individual) -> None:
        if individual.config in self._by_config:
            raise ProtocolError(f"configuration already evaluated: {individual.config!r}")
        key = -individual.fitness
        i = bisect.bisect_right(self._neg_fitness, key)
        self._neg_fitness.insert(i, key)
        self._ranked.insert(i, individual)
        self._by_config[individual.config] = individual
        self._insertion.append(individual)

    def top(self, k: int) -> list[Individual]:
        return self._ranked[:k]

    @property
    def best(self) -> Individual:
        if not self._ranked:
            raise ProtocolError("archive is empty")
        return self._ranked[0]

    def configs(self) -> set[tuple]:
        return set(self._by_config)


@dataclass
class AskResult:
    """A batch of novel configurations, or an empty batch.

    ``exhausted`` is set when the batch is empty because every configuration
    in the space has already been evaluated (as opposed to the budget having
    run out).
    """

    configs: list[tuple] = field(default_factory=list)
    exhausted: bool = False


def recombine(
    parents: list[Individual], space: SearchSpace, rng: np.random.Generator
) -> tuple:
    """One child: each parameter inherited from a fitness-proportional parent.

    A parent with fitness 0 contributes nothing while any parent has positive
    fitness; when all fitnesses are 0 the choice falls back to uniform so the
    search keeps moving.
    """
    if not parents:
        raise ProtocolError("recombination needs at least one parent")
    fitnesses = np.array([p.fitness for p in parents], dtype=float)
    total = fitnesses.sum()
    probs = fitnesses / total if total > 0.0 else None
    picks = rng.choice(len(parents), size=len(space), p=probs)
    return tuple(parents[int(j)].config[i] for i, j in enumerate(picks))


def mutate(
    config: tuple, space: SearchSpace, rate: float, rng: np.random.Generator
) -> tuple:
    """Mutate every parameter independently with a killed random walk."""
    return tuple(
        sample_walk(param, value, rate, rng)
        for param, value in zip(space.spaces, config)
    )


class OpEvo:
    """Single-owner state machine driving the evolutionary search.

    Strict alternation is enforced: every ``ask`` must be answered by exactly
    one ``tell`` covering the full batch before the next ``ask``.  The
    configurations handed out are immutable tuples and may be evaluated
    concurrently; results must be gathered into one ``tell``.
    """

    def __init__(self, space: SearchSpace, config: EngineConfig | None = None) -> None:
        self.space = space
        self.config = config if config is not None else EngineConfig()
        self.archive = Archive()
        self._rng = np.random.default_rng(self.config.seed)
        self._pending: list[tuple] | None = None
        self._total = space.size()

    @property
    def evaluations(self) -> int:
        return len(self.archive)

    def ask(self) -> AskResult:
        if self._pending is not None:
            raise ProtocolError("ask() called before the previous batch was told")
        unvisited = self._total - len(self.archive)
        if unvisited <= 0:
            return AskResult(exhausted=True)
        budget_left = self.config.budget - len(self.archive)
        if budget_left <= 0:
            return AskResult()
        if len(self.archive) == 0:
            want = min(self.config.parents, budget_left, unvisited)
            batch = self._initial_batch(want)
        else:
            want = min(self.config.offspring, budget_left, unvisited)
            batch = self._offspring_batch(want)
        self._pending = batch
        return AskResult(configs=list(batch))

    def tell(self, results: list[tuple]) -> None:
        """Report ``(configuration, fitness)`` pairs for the last asked batch."""
        if self._pending is None:
            raise ProtocolError("tell() called with no outstanding ask")
        pending = set(self._pending)
        reported: dict[tuple, float] = {}
        for config, fitness in results:
            config = tuple(config)
            fitness = float(fitness)
            if config not in pending:
                raise ProtocolError(f"configuration was not asked: {config!r}")
            if config in reported:
                raise ProtocolError(f"duplicate result for {config!r}")
            if math.isnan(fitness) or math.isinf(fitness) or fitness < 0.0:
                raise ProtocolError(f"fitness must be finite and >= 0, got {fitness}")
            reported[config] = fitness
        if len(reported) != len(self._pending):
            missing = [c for c in self._pending if c not in reported]
            raise ProtocolError(f"results missing for {len(missing)} asked configurations")
        # Insert in ask order so archive tie-breaking ignores gather order.
        for config in self._pending:
            self.archive.add(Individual(config, reported[config]))
        self._pending = None

    def best(self) -> Individual:
        if len(self.archive) == 0:
            raise ProtocolError("best() called before any tell")
        return self.archive.best

    def _initial_batch(self, want: int) -> list[tuple]:
        batch: list[tuple] = []
        taken: set[tuple] = set()
        for _ in range(want):
            config = None
            for _ in range(self.config.retry_cap):
                candidate = self.space.sample_uniform(self._rng)
                if candidate not in taken:
                    config = candidate
                    break
            if config is None:
                config = sample_unvisited(self.space, taken, self._rng)
            batch.append(config)
            taken.add(config)
        return batch

    def _offspring_batch(self, want: int) -> list[tuple]:
        parents = self.archive.top(self.config.parents)
        batch: list[tuple] = []
        taken: set[tuple] = set()
        for _ in range(want):
            child = None
            base = recombine(parents, self.space, self._rng)
            for _ in range(self.config.retry_cap):
                candidate = mutate(base, self.space, self.config.mutation_rate, self._rng)
                if candidate not in self.archive and candidate not in taken:
                    child = candidate
                    break
            if child is None:
                visited = self.archive.configs() | taken
                child = sample_unvisited(self.space, visited, self._rng)
            batch.append(child)
            taken.add(child)
        return batch


def evaluate_batch(
    objective: Callable[[tuple], float],
    configs: list[tuple],
    concurrency: int = 1,
) -> list[float]:
    """Evaluate configurations, mapping failures to fitness 0.

    An objective that raises, or returns a negative or non-finite number, is
    treated as an invalid evaluation rather than aborting the run.  Results
    are returned in the order of ``configs`` regardless of completion order.
    """

    def safe(config: tuple) -> float:
        try:
            fitness = float(objective(config))
        except FatalEvaluationError:
            raise
        except Exception:
            return 0.0
        if math.isnan(fitness) or math.isinf(fitness) or fitness < 0.0:
            return 0.0
        return fitness

    if concurrency > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            return list(pool.map(safe, configs))
    return [safe(c) for c in configs]


def run(
    space: SearchSpace,
    config: EngineConfig,
    objective: Callable[[tuple], float],
    concurrency: int = 1,
) -> tuple[Individual, list[TrialRecord]]:
    """Drive ask/tell until the budget is spent or the space is exhausted."""
    engine = OpEvo(space, config)
    recorder = TrialRecorder(space)
    while True:
        asked = engine.ask()
        if not asked.configs:
            break
        fitnesses = evaluate_batch(objective, asked.configs, concurrency)
        engine.tell(list(zip(asked.configs, fitnesses)))
        for cfg, fit in zip(asked.configs, fitnesses):
            recorder.record(cfg, fit)
    return engine.best(), recorder.records
