"""Reference optimizers sharing the search-space abstraction.

Three baselines for head-to-head comparisons against the evolutionary
engine, all emitting the same trial-log schema and never spending more
objective evaluations than their budget:

* :func:`random_search` -- deduplicated uniform sampling.
* :func:`simulated_annealing` -- Metropolis acceptance over single-parameter
  neighbor moves with geometric cooling; revisited configurations are served
  from a cache and do not consume budget.
* :func:`greedy_bfs` -- a best-first frontier over the same move set,
  expanding a bounded random pool of unvisited neighbors of the current best.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .engine import evaluate_batch
from .logs import Individual, TrialRecord, TrialRecorder
from .spaces import SearchSpace, sample_unvisited

# Safety valve for annealing chains that cycle through cached states without
# spending budget; generous enough never to bind in normal operation.
_SA_PROPOSALS_PER_TRIAL = 200


@dataclass
class SaConfig:
    """Simulated-annealing knobs.

    When ``initial_temp`` is None it is calibrated to the population standard
    deviation of ``warmup`` uniformly sampled evaluations (which count
    against the budget and appear in the log).
    """

    initial_temp: float | None = None
    cooling: float = 0.95
    moves_per_temp: int = 1
    warmup: int = 20

    def __post_init__(self) -> None:
        if self.initial_temp is not None and not self.initial_temp > 0:
            raise ValueError(f"initial_temp must be positive, got {self.initial_temp}")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError(f"cooling must lie in (0, 1), got {self.cooling}")
        if not (isinstance(self.moves_per_temp, int) and self.moves_per_temp >= 1):
            raise ValueError(f"moves_per_temp must be >= 1, got {self.moves_per_temp}")
        if not (isinstance(self.warmup, int) and self.warmup >= 2):
            raise ValueError(f"warmup must be >= 2, got {self.warmup}")


@dataclass
class GbfsConfig:
    """Greedy best-first knobs: expansion pool size and an optional start.

    ``start`` defaults to a uniformly sampled configuration; an explicit
    start makes runs comparable across algorithms and testable on known
    landscapes.
    """

    pool_size: int = 5
    start: tuple | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.pool_size, int) and self.pool_size >= 1):
            raise ValueError(f"pool_size must be >= 1, got {self.pool_size}")


def metropolis_accept(
    rng: np.random.Generator, current: float, candidate: float, temperature: float
) -> bool:
    """Maximizing Metropolis rule: accept with probability min(1, e^((cand-cur)/T))."""
    if candidate >= current:
        return True
    if temperature <= 0.0:
        return False
    delta = (candidate - current) / temperature
    # exp underflows to 0 for very negative delta, which is the right limit.
    return float(rng.random()) < math.exp(max(delta, -745.0))


def calibrate_temperature(observed: list[float]) -> float:
    """Start temperature from warmup fitnesses: their population standard deviation.

    A flat warmup (zero spread) gives no scale; fall back to 1.0 so the
    chain still anneals rather than dividing by zero.
    """
    temperature = float(np.std(observed))
    return temperature if temperature > 0.0 else 1.0


def random_search(
    space: SearchSpace,
    budget: int,
    seed: int,
    objective: Callable[[tuple], float],
) -> tuple[Individual, list[TrialRecord]]:
    """Uniform sampling without replacement until budget or exhaustion."""
    rng = np.random.default_rng(seed)
    recorder = TrialRecorder(space)
    visited: set[tuple] = set()
    while len(recorder.records) < budget:
        config = sample_unvisited(space, visited, rng)
        if config is None:
            break
        visited.add(config)
        recorder.record(config, evaluate_batch(objective, [config])[0])
    return recorder.best, recorder.records


def simulated_annealing(
    space: SearchSpace,
    config: SaConfig,
    budget: int,
    seed: int,
    objective: Callable[[tuple], float],
) -> tuple[Individual, list[TrialRecord]]:
    """Single-parameter neighbor moves under Metropolis acceptance.

    The budget counts objective calls only: proposals that revisit a cached
    configuration are free, so comparison plots against other optimizers
    share an honest x-axis.
    """
    rng = np.random.default_rng(seed)
    recorder = TrialRecorder(space)
    cache: dict[tuple, float] = {}
    total = space.size()

    def fitness_of(cfg: tuple) -> float:
        if cfg in cache:
            return cache[cfg]
        value = evaluate_batch(objective, [cfg])[0]
        cache[cfg] = value
        recorder.record(cfg, value)
        return value

    def propose(cfg: tuple) -> tuple | None:
        movable = [i for i, sp in enumerate(space.spaces) if sp.size() > 1]
        if not movable:
            return None
        i = movable[int(rng.integers(len(movable)))]
        nbrs = space.spaces[i].neighbors(cfg[i])
        step = nbrs[int(rng.integers(len(nbrs)))]
        return cfg[:i] + (step,) + cfg[i + 1 :]

    current = space.sample_uniform(rng)
    current_fitness = fitness_of(current)

    temperature = config.initial_temp
    if temperature is None:
        observed = [current_fitness]
        while len(observed) < config.warmup and len(recorder.records) < budget:
            observed.append(fitness_of(space.sample_uniform(rng)))
        temperature = calibrate_temperature(observed)

    proposals = 0
    proposal_cap = _SA_PROPOSALS_PER_TRIAL * budget
    while (
        len(recorder.records) < budget
        and len(cache) < total
        and proposals < proposal_cap
    ):
        candidate = propose(current)
        if candidate is None:
            break
        candidate_fitness = fitness_of(candidate)
        if metropolis_accept(rng, current_fitness, candidate_fitness, temperature):
            current, current_fitness = candidate, candidate_fitness
        proposals += 1
        if proposals % config.moves_per_temp == 0:
            temperature *= config.cooling
    return recorder.best, recorder.records


def greedy_bfs(
    space: SearchSpace,
    config: GbfsConfig,
    budget: int,
    seed: int,
    objective: Callable[[tuple], float],
) -> tuple[Individual, list[TrialRecord]]:
    """Best-first expansion of unvisited single-move neighbors.

    Pops the fittest evaluated configuration, evaluates up to ``pool_size``
    of its unvisited neighbors (a uniform subset when more exist), and pushes
    them.  A configuration with neighbors left unexpanded is re-queued, so on
    small spaces the frontier drains only once everything reachable has been
    evaluated.
    """
    rng = np.random.default_rng(seed)
    recorder = TrialRecorder(space)

    start = config.start if config.start is not None else space.sample_uniform(rng)
    space.require(start)
    visited = {start}
    start_fitness = evaluate_batch(objective, [start])[0]
    recorder.record(start, start_fitness)

    counter = 1  # insertion order breaks fitness ties deterministically
    frontier: list[tuple[float, int, tuple]] = [(-start_fitness, 0, start)]
    while frontier and len(recorder.records) < budget:
        neg_fitness, _, node = heapq.heappop(frontier)
        unvisited = [w for w in space.single_move_neighbors(node) if w not in visited]
        if not unvisited:
            continue
        if len(unvisited) > config.pool_size:
            picked = rng.choice(len(unvisited), size=config.pool_size, replace=False)
            pool = [unvisited[int(i)] for i in picked]
            # Unexpanded neighbors remain; keep the node in play.
            heapq.heappush(frontier, (neg_fitness, counter, node))
            counter += 1
        else:
            pool = unvisited
        for cfg in pool:
            if len(recorder.records) >= budget:
                break
            visited.add(cfg)
            fitness = evaluate_batch(objective, [cfg])[0]
            recorder.record(cfg, fitness)
            heapq.heappush(frontier, (-fitness, counter, cfg))
            counter += 1
    return recorder.best, recorder.records
