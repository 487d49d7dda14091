"""Killed random walks over parameter-space topologies.

The walk starts at a value and, at every step, stops where it stands with
probability ``1 - rate``; otherwise it moves to a neighbor chosen uniformly.
The distribution of the stopping point is the mutation distribution used by
the evolutionary engine: rate 0 never moves, and rates approaching 1 spread
arbitrarily far along the graph.

Two routes to that distribution are provided.  :func:`sample_walk` simulates
the process lazily (it only ever queries ``neighbors``, so it works on spaces
far too large to enumerate).  :func:`walk_distribution` computes the exact
stopping distribution on a materialized :class:`~topotune.spaces.TopologyGraph`
by solving ``(I - Q) x = e_start`` and scaling by the per-vertex stop
probability; it exists to validate the sampler and for diagnostics, not for
the hot path.
"""

from __future__ import annotations

import numpy as np

from .spaces import ParameterSpace, TopologyGraph

# A walk takes rate/(1-rate) steps in expectation, so any admissible rate
# finishes far below this; hitting the cap means a broken rng, not bad luck.
MAX_WALK_STEPS = 1_000_000


def check_rate(rate: float) -> float:
    """Validate a walk/mutation rate: 0 <= rate < 1.

    Rate 0 is the degenerate stand-still walk; rates at or above 1 are
    rejected because the walk would no longer stop almost surely.
    """
    rate = float(rate)
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"rate must satisfy 0 <= rate < 1, got {rate}")
    return rate


def sample_walk(
    space: ParameterSpace,
    start,
    rate: float,
    rng: np.random.Generator,
):
    """One draw from the stopping distribution of the killed walk from ``start``."""
    rate = check_rate(rate)
    space.require(start)
    current = start
    for _ in range(MAX_WALK_STEPS):
        if rng.random() >= rate:
            return current
        nbrs = space.neighbors(current)
        if not nbrs:
            # Isolated vertex: nowhere to go, the walk ends here.
            return current
        current = nbrs[int(rng.integers(len(nbrs)))]
    raise RuntimeError(f"walk failed to stop within {MAX_WALK_STEPS} steps")


def transition_matrix(graph: TopologyGraph, rate: float) -> np.ndarray:
    """Column-scaled transition matrix: entry [v, u] = rate/deg(u) for v ~ u.

    Every column with at least one neighbor sums to ``rate``; columns of
    isolated vertices are zero.
    """
    rate = check_rate(rate)
    n = len(graph)
    q = np.zeros((n, n))
    for u, nbrs in enumerate(graph.adjacency):
        if nbrs:
            q[nbrs, u] = rate / len(nbrs)
    return q


def walk_distribution(graph: TopologyGraph, start: int, rate: float) -> np.ndarray:
    """Exact stopping distribution of the killed walk from vertex ``start``.

    Solves ``(I - Q) x = e_start`` by dense LU elimination with partial
    pivoting and scales by the stop probability (``1 - rate`` at vertices
    with neighbors, 1 at isolated vertices, where the walk must end).  The
    system is provably non-singular for ``rate < 1``, and the result is a
    probability vector supported on the start vertex's connected component.
    """
    rate = check_rate(rate)
    n = len(graph)
    if not 0 <= start < n:
        raise IndexError(f"start vertex {start} out of range for {n} vertices")
    q = transition_matrix(graph, rate)
    p0 = np.zeros(n)
    p0[start] = 1.0
    x = np.linalg.solve(np.eye(n) - q, p0)
    stop = np.where([len(a) > 0 for a in graph.adjacency], 1.0 - rate, 1.0)
    return stop * x


def column_sum_deviation(graph: TopologyGraph, rate: float) -> float:
    """Diagnostic: max |column sum of (I - Q)^-1  -  1/(1 - rate)|.

    On graphs where every vertex has a neighbor, each column of the
    fundamental matrix sums to exactly 1/(1 - rate); the returned deviation
    should sit at numerical noise.  Isolated vertices break the premise and
    show up as a genuine deviation.
    """
    rate = check_rate(rate)
    n = len(graph)
    fundamental = np.linalg.inv(np.eye(n) - transition_matrix(graph, rate))
    sums = fundamental.sum(axis=0)
    return float(np.max(np.abs(sums - 1.0 / (1.0 - rate))))
