"""Killed-random-walk distribution: exact solver vs sampler vs power series.

The exact solver is cross-checked against an independent truncated power
series S = sum_t stop * Q^t e_start, and the lazy sampler is checked against
the exact solver in total variation.
"""

from __future__ import annotations

import numpy as np
import pytest

from topotune.spaces import (
    Categorical,
    Discrete,
    Factorization,
    Permutation,
    build_graph,
)
from topotune.walk import (
    check_rate,
    column_sum_deviation,
    sample_walk,
    transition_matrix,
    walk_distribution,
)

RATE_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]

ORACLE_SPACES = [
    Factorization(8, 3),
    Permutation(("a", "b", "c")),
    Discrete((1, 2, 3, 4)),
    Categorical(("a", "b", "c", "d", "e", "f")),
    Factorization(16, 3),
    Factorization(60, 3),
    Permutation(("w", "x", "y", "z")),
    Discrete(tuple(range(9))),
    Categorical(tuple("abcdefghijklm")),
]


def power_series_distribution(graph, start, rate, terms=200):
    """Independent oracle: stop-probability mass accumulated step by step."""
    n = len(graph)
    q = transition_matrix(graph, rate)
    stop = np.where([len(a) > 0 for a in graph.adjacency], 1.0 - rate, 1.0)
    p = np.zeros(n)
    p[start] = 1.0
    total = np.zeros(n)
    for _ in range(terms):
        total += stop * p
        p = q @ p
    return total


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


class TestExactDistribution:
    def test_three_vertex_path_hand_solved(self):
        graph = build_graph(Discrete((1, 2, 3)))
        dist = walk_distribution(graph, 0, 0.5)
        np.testing.assert_allclose(dist, [7 / 12, 1 / 3, 1 / 12], atol=1e-12)

    def test_complete_graph_k2_geometric_series(self):
        graph = build_graph(Discrete((1, 2)))  # two vertices, one edge
        dist = walk_distribution(graph, 0, 0.5)
        np.testing.assert_allclose(dist, [2 / 3, 1 / 3], atol=1e-12)

    def test_rate_zero_is_one_hot(self):
        for space in ORACLE_SPACES[:4]:
            graph = build_graph(space)
            dist = walk_distribution(graph, 2 % len(graph), 0.0)
            expected = np.zeros(len(graph))
            expected[2 % len(graph)] = 1.0
            np.testing.assert_allclose(dist, expected, atol=0)

    def test_isolated_vertex_keeps_all_mass(self):
        graph = build_graph(Factorization(1, 2))
        dist = walk_distribution(graph, 0, 0.9)
        np.testing.assert_allclose(dist, [1.0], atol=0)

    @pytest.mark.parametrize("rate", [0.2, 0.5, 0.8])
    @pytest.mark.parametrize("space", ORACLE_SPACES[:5], ids=lambda s: f"{s.kind}{s.size()}")
    def test_matches_power_series(self, space, rate):
        graph = build_graph(space)
        exact = walk_distribution(graph, 0, rate)
        series = power_series_distribution(graph, 0, rate)
        # 200 terms leave at most rate^200 of mass unaccounted.
        np.testing.assert_allclose(exact, series, atol=1e-9)

    @pytest.mark.parametrize("rate", RATE_GRID)
    @pytest.mark.parametrize("space", ORACLE_SPACES, ids=lambda s: f"{s.kind}{s.size()}")
    def test_valid_probability_distribution(self, space, rate):
        graph = build_graph(space)
        assert len(graph) <= 200
        for start in range(0, len(graph), max(1, len(graph) // 5)):
            dist = walk_distribution(graph, start, rate)
            assert np.all(dist >= 0)
            assert abs(dist.sum() - 1.0) < 1e-9

    @pytest.mark.parametrize("rate", RATE_GRID)
    def test_stop_mass_at_start_at_least_one_minus_rate(self, rate):
        for space in ORACLE_SPACES[:4]:
            graph = build_graph(space)
            dist = walk_distribution(graph, 0, rate)
            assert dist[0] >= (1.0 - rate) - 1e-12

    def test_spread_monotone_in_rate_at_start(self):
        graph = build_graph(Factorization(8, 3))
        start = graph.index_of((8, 1, 1))
        masses = [walk_distribution(graph, start, r)[start] for r in RATE_GRID]
        assert all(a > b for a, b in zip(masses, masses[1:]))

    def test_degree_sensitivity_from_corner(self):
        # From (8,1,1) at rate 0.5: the balanced tuple out-scores the skewed
        # tuples at the same distance because it has the larger degree.
        graph = build_graph(Factorization(8, 3))
        dist = walk_distribution(graph, graph.index_of((8, 1, 1)), 0.5)
        balanced = dist[graph.index_of((2, 2, 2))]
        assert balanced > dist[graph.index_of((2, 1, 4))]
        assert balanced > dist[graph.index_of((2, 4, 1))]

    def test_rate_validation(self):
        graph = build_graph(Discrete((1, 2)))
        for bad in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError):
                walk_distribution(graph, 0, bad)
        with pytest.raises(IndexError):
            walk_distribution(graph, 5, 0.5)


class TestColumnSums:
    @pytest.mark.parametrize("rate", RATE_GRID)
    @pytest.mark.parametrize("space", ORACLE_SPACES, ids=lambda s: f"{s.kind}{s.size()}")
    def test_fundamental_matrix_column_sums(self, space, rate):
        graph = build_graph(space)
        assert column_sum_deviation(graph, rate) < 1e-9

    def test_known_values(self):
        path = build_graph(Discrete((1, 2, 3)))
        q = transition_matrix(path, 0.5)
        sums = np.linalg.inv(np.eye(3) - q).sum(axis=0)
        np.testing.assert_allclose(sums, 2.0, atol=1e-9)
        complete = build_graph(Categorical(("a", "b", "c", "d", "e", "f")))
        q = transition_matrix(complete, 0.9)
        sums = np.linalg.inv(np.eye(6) - q).sum(axis=0)
        np.testing.assert_allclose(sums, 10.0, atol=1e-9)

    def test_rate_zero_gives_identity(self):
        graph = build_graph(Factorization(8, 3))
        assert column_sum_deviation(graph, 0.0) == 0.0

    def test_column_sums_of_q_equal_rate(self):
        for space in ORACLE_SPACES[:4]:
            graph = build_graph(space)
            q = transition_matrix(graph, 0.6)
            np.testing.assert_allclose(q.sum(axis=0), 0.6, atol=1e-12)


class TestSampler:
    def test_rate_zero_returns_start(self):
        space = Factorization(8, 3)
        rng = np.random.default_rng(0)
        assert all(sample_walk(space, (2, 2, 2), 0.0, rng) == (2, 2, 2) for _ in range(50))

    def test_isolated_vertex_returns_start(self):
        space = Factorization(1, 2)
        rng = np.random.default_rng(0)
        assert all(sample_walk(space, (1, 1), 0.9, rng) == (1, 1) for _ in range(50))

    def test_infeasible_start_rejected(self):
        with pytest.raises(ValueError):
            sample_walk(Factorization(8, 3), (3, 2, 1), 0.5, np.random.default_rng(0))

    def test_path_frequencies_match_hand_solution(self):
        space = Discrete((1, 2, 3))
        rng = np.random.default_rng(42)
        draws = 200_000
        counts = {1: 0, 2: 0, 3: 0}
        for _ in range(draws):
            counts[sample_walk(space, 1, 0.5, rng)] += 1
        freqs = np.array([counts[1], counts[2], counts[3]]) / draws
        assert total_variation(freqs, [7 / 12, 1 / 3, 1 / 12]) < 0.01

    @pytest.mark.parametrize("rate", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize(
        "space",
        [
            Factorization(8, 3),
            Permutation(("a", "b", "c")),
            Discrete((1, 2, 3, 4)),
            Categorical(("a", "b", "c", "d", "e", "f")),
            Factorization(16, 2),
        ],
        ids=lambda s: f"{s.kind}{s.size()}",
    )
    def test_sampler_matches_exact_distribution(self, space, rate):
        graph = build_graph(space)
        assert len(graph) <= 20
        start_value = graph.vertices[0]
        exact = walk_distribution(graph, 0, rate)
        rng = np.random.default_rng(123)
        draws = 100_000
        counts = np.zeros(len(graph))
        for _ in range(draws):
            counts[graph.index_of(sample_walk(space, start_value, rate, rng))] += 1
        assert total_variation(counts / draws, exact) < 0.02

    def test_check_rate_bounds(self):
        assert check_rate(0.0) == 0.0
        assert check_rate(0.999) == 0.999
        for bad in (-1e-9, 1.0, 2.0, float("nan")):
            with pytest.raises(ValueError):
                check_rate(bad)
