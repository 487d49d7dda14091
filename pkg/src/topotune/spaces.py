"""Parameter spaces and the neighborhood topologies defined over them.

Four kinds of tunable parameter are supported.  Each kind pairs a finite
feasible set with an adjacency relation, turning the set into an undirected
graph:

* :class:`Factorization` -- ordered tuples of positive integers with a fixed
  product (loop-tiling splits); two tuples are adjacent when one is obtained
  from the other by moving a single prime factor between two positions.
* :class:`Permutation` -- orderings of distinct labels (loop order); adjacent
  under transpositions of two positions.
* :class:`Discrete` -- a finite increasing list of numbers; consecutive
  values are adjacent (a path graph).
* :class:`Categorical` -- unordered labels; every pair is adjacent (a
  complete graph).

A :class:`SearchSpace` is an ordered, named product of parameter spaces.
Everything here is a pure function of immutable inputs plus an explicit
``numpy.random.Generator`` where randomness is involved, so concurrent use
needs no locking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator

import numpy as np

DEFAULT_ENUMERATION_CAP = 1_000_000


def prime_factorization(n: int) -> dict[int, int]:
    """Prime -> exponent map of a positive integer, by trial division."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _sorted_divisors(factors: dict[int, int]) -> list[int]:
    divisors = [1]
    for p, e in factors.items():
        divisors = [d * p**k for d in divisors for k in range(e + 1)]
    return sorted(divisors)


def _tuple_count(factors: dict[int, int], arity: int) -> int:
    """Number of ordered `arity`-tuples of positive ints with a given product.

    Each prime's exponent is distributed independently over the positions,
    giving a product of stars-and-bars counts.
    """
    count = 1
    for e in factors.values():
        count *= math.comb(e + arity - 1, arity - 1)
    return count


def uniform_index(rng: np.random.Generator, n: int) -> int:
    """Exact uniform draw from ``range(n)``; handles n beyond 64 bits."""
    if n <= 0:
        raise ValueError("cannot draw from an empty range")
    if n <= (1 << 63) - 1:
        return int(rng.integers(n))
    bits = n.bit_length()
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    # Rejection keeps the draw exactly uniform for arbitrary-precision sizes.
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "big") & mask
        if r < n:
            return r


class ParameterSpace:
    """Base interface shared by the four parameter kinds.

    Values are plain hashable Python objects (tuples, numbers, strings) so
    they can serve directly as dictionary keys for deduplication.  Neighbor
    lists are returned in a fixed canonical order, which keeps seeded runs
    reproducible across processes.
    """

    kind: str = ""

    def size(self) -> int:
        raise NotImplementedError

    def contains(self, value: Any) -> bool:
        raise NotImplementedError

    def require(self, value: Any) -> None:
        """Raise ``ValueError`` naming the violated constraint if infeasible."""
        raise NotImplementedError

    def neighbors(self, value: Any) -> list[Any]:
        """All values adjacent to ``value``, deduplicated, canonically ordered."""
        raise NotImplementedError

    def unrank(self, index: int) -> Any:
        """The ``index``-th value in canonical enumeration order."""
        raise NotImplementedError

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list[Any]:
        """Every feasible value once, in canonical order; refuses above ``cap``."""
        n = self.size()
        if n > cap:
            raise ValueError(
                f"{self.kind} space has {n} values, above the enumeration cap {cap}"
            )
        return [self.unrank(i) for i in range(n)]

    def sample_uniform(self, rng: np.random.Generator) -> Any:
        """A value drawn uniformly over the feasible set."""
        return self.unrank(uniform_index(rng, self.size()))

    def value_to_json(self, value: Any) -> Any:
        raise NotImplementedError

    def value_from_json(self, obj: Any) -> Any:
        raise NotImplementedError

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.size():
            raise IndexError(f"rank {index} out of range for size {self.size()}")


@dataclass(frozen=True)
class Factorization(ParameterSpace):
    """Ordered ``arity``-tuples of positive integers whose product is ``product``.

    Two tuples are adjacent when moving one prime factor from one position to
    another transforms one into the other.  The graph is connected; the
    all-in-one-slot tuples are its lowest-degree corners.
    """

    product: int
    arity: int

    kind = "factorization"

    def __post_init__(self) -> None:
        if not (isinstance(self.product, int) and self.product >= 1):
            raise ValueError(f"product must be a positive integer, got {self.product}")
        if not (isinstance(self.arity, int) and self.arity >= 1):
            raise ValueError(f"arity must be a positive integer, got {self.arity}")

    @cached_property
    def _factors(self) -> dict[int, int]:
        return prime_factorization(self.product)

    @cached_property
    def _primes(self) -> tuple[int, ...]:
        return tuple(sorted(self._factors))

    def size(self) -> int:
        return _tuple_count(self._factors, self.arity)

    def contains(self, value: Any) -> bool:
        if not (isinstance(value, tuple) and len(value) == self.arity):
            return False
        if not all(isinstance(v, int) and v >= 1 for v in value):
            return False
        return math.prod(value) == self.product

    def require(self, value: Any) -> None:
        if not (isinstance(value, tuple) and len(value) == self.arity):
            raise ValueError(f"expected a {self.arity}-tuple, got {value!r}")
        if not all(isinstance(v, int) and v >= 1 for v in value):
            raise ValueError(f"factors must be positive integers, got {value!r}")
        if math.prod(value) != self.product:
            raise ValueError(
                f"factors of {value!r} multiply to {math.prod(value)}, "
                f"expected {self.product}"
            )

    def neighbors(self, value: tuple[int, ...]) -> list[tuple[int, ...]]:
        self.require(value)
        seen: set[tuple[int, ...]] = set()
        for src, component in enumerate(value):
            for p in self._primes:
                if component % p:
                    continue
                for dst in range(self.arity):
                    if dst == src:
                        continue
                    moved = list(value)
                    moved[src] = component // p
                    moved[dst] = value[dst] * p
                    seen.add(tuple(moved))
        return sorted(seen)

    def unrank(self, index: int) -> tuple[int, ...]:
        self._check_index(index)
        out: list[int] = []
        remaining = self.product
        slots = self.arity
        while slots > 1:
            facs = prime_factorization(remaining)
            for d in _sorted_divisors(facs):
                count = _tuple_count(prime_factorization(remaining // d), slots - 1)
                if index < count:
                    out.append(d)
                    remaining //= d
                    slots -= 1
                    break
                index -= count
        out.append(remaining)
        return tuple(out)

    def value_to_json(self, value: tuple[int, ...]) -> list[int]:
        return list(value)

    def value_from_json(self, obj: Any) -> tuple[int, ...]:
        if not isinstance(obj, list):
            raise ValueError(f"expected an integer array, got {obj!r}")
        value = tuple(int(v) for v in obj)
        self.require(value)
        return value


@dataclass(frozen=True)
class Permutation(ParameterSpace):
    """All orderings of ``items``; orderings one transposition apart are adjacent."""

    items: tuple[str, ...]

    kind = "permutation"

    def __post_init__(self) -> None:
        if len(self.items) < 1:
            raise ValueError("permutation needs at least one item")
        if len(set(self.items)) != len(self.items):
            raise ValueError(f"permutation items must be distinct, got {self.items}")
        if not all(isinstance(x, str) for x in self.items):
            raise ValueError("permutation items must be strings")

    @cached_property
    def _rank_of(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.items)}

    def size(self) -> int:
        return math.factorial(len(self.items))

    def contains(self, value: Any) -> bool:
        return (
            isinstance(value, tuple)
            and len(value) == len(self.items)
            and set(value) == set(self.items)
        )

    def require(self, value: Any) -> None:
        if not self.contains(value):
            raise ValueError(f"{value!r} is not an ordering of {self.items}")

    def neighbors(self, value: tuple[str, ...]) -> list[tuple[str, ...]]:
        self.require(value)
        n = len(value)
        swapped = []
        for i in range(n):
            for j in range(i + 1, n):
                w = list(value)
                w[i], w[j] = w[j], w[i]
                swapped.append(tuple(w))
        rank = self._rank_of
        swapped.sort(key=lambda t: tuple(rank[x] for x in t))
        return swapped

    def unrank(self, index: int) -> tuple[str, ...]:
        self._check_index(index)
        pool = list(self.items)
        out = []
        block = math.factorial(len(pool))
        for i in range(len(self.items), 0, -1):
            block //= i
            j, index = divmod(index, block)
            out.append(pool.pop(j))
        return tuple(out)

    def value_to_json(self, value: tuple[str, ...]) -> list[str]:
        return list(value)

    def value_from_json(self, obj: Any) -> tuple[str, ...]:
        if not isinstance(obj, list):
            raise ValueError(f"expected a label array, got {obj!r}")
        value = tuple(str(x) for x in obj)
        self.require(value)
        return value


@dataclass(frozen=True)
class Discrete(ParameterSpace):
    """A strictly increasing list of numbers; consecutive values are adjacent."""

    values: tuple[float, ...]

    kind = "discrete"

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("discrete space needs at least one value")
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in self.values):
            raise ValueError(f"discrete values must be finite numbers, got {self.values}")
        # Ties are rejected rather than merged: adjacency needs a total order.
        if any(a >= b for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"discrete values must be strictly increasing, got {self.values}")

    @cached_property
    def _index_of(self) -> dict[float, int]:
        return {v: i for i, v in enumerate(self.values)}

    def size(self) -> int:
        return len(self.values)

    def contains(self, value: Any) -> bool:
        return isinstance(value, (int, float)) and value in self._index_of

    def require(self, value: Any) -> None:
        if not self.contains(value):
            raise ValueError(f"{value!r} is not one of the declared values {self.values}")

    def neighbors(self, value: float) -> list[float]:
        self.require(value)
        i = self._index_of[value]
        out = []
        if i > 0:
            out.append(self.values[i - 1])
        if i + 1 < len(self.values):
            out.append(self.values[i + 1])
        return out

    def unrank(self, index: int) -> float:
        self._check_index(index)
        return self.values[index]

    def value_to_json(self, value: float) -> float:
        return value

    def value_from_json(self, obj: Any) -> float:
        if not isinstance(obj, (int, float)):
            raise ValueError(f"expected a number, got {obj!r}")
        self.require(obj)
        # Return the declared object so int/float spelling stays canonical.
        return self.values[self._index_of[obj]]


@dataclass(frozen=True)
class Categorical(ParameterSpace):
    """Distinct opaque labels with no order; every pair is adjacent."""

    labels: tuple[str, ...]

    kind = "categorical"

    def __post_init__(self) -> None:
        if len(self.labels) < 1:
            raise ValueError("categorical space needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"categorical labels must be distinct, got {self.labels}")
        if not all(isinstance(x, str) for x in self.labels):
            raise ValueError("categorical labels must be strings")

    def size(self) -> int:
        return len(self.labels)

    def contains(self, value: Any) -> bool:
        return value in self.labels

    def require(self, value: Any) -> None:
        if not self.contains(value):
            raise ValueError(f"{value!r} is not one of the declared labels {self.labels}")

    def neighbors(self, value: str) -> list[str]:
        self.require(value)
        return [x for x in self.labels if x != value]

    def unrank(self, index: int) -> str:
        self._check_index(index)
        return self.labels[index]

    def value_to_json(self, value: str) -> str:
        return value

    def value_from_json(self, obj: Any) -> str:
        if not isinstance(obj, str):
            raise ValueError(f"expected a string label, got {obj!r}")
        self.require(obj)
        return obj


_KINDS: dict[str, type[ParameterSpace]] = {
    "factorization": Factorization,
    "permutation": Permutation,
    "discrete": Discrete,
    "categorical": Categorical,
}


def parameter_space_from_json(obj: dict[str, Any]) -> ParameterSpace:
    """Build one parameter space from its JSON declaration (sans name)."""
    kind = obj.get("kind")
    if kind == "factorization":
        return Factorization(int(obj["product"]), int(obj["arity"]))
    if kind == "permutation":
        return Permutation(tuple(str(x) for x in obj["items"]))
    if kind == "discrete":
        return Discrete(tuple(obj["values"]))
    if kind == "categorical":
        return Categorical(tuple(str(x) for x in obj["labels"]))
    raise ValueError(f"unknown parameter kind {kind!r}; expected one of {sorted(_KINDS)}")


def parameter_space_to_json(space: ParameterSpace) -> dict[str, Any]:
    if isinstance(space, Factorization):
        return {"kind": "factorization", "product": space.product, "arity": space.arity}
    if isinstance(space, Permutation):
        return {"kind": "permutation", "items": list(space.items)}
    if isinstance(space, Discrete):
        return {"kind": "discrete", "values": list(space.values)}
    if isinstance(space, Categorical):
        return {"kind": "categorical", "labels": list(space.labels)}
    raise TypeError(f"not a parameter space: {space!r}")


class SearchSpace:
    """An ordered product of named parameter spaces.

    A configuration is a plain tuple holding one value per parameter, in
    declaration order.  Tuples are hashable, so configurations can be used
    directly for dedup bookkeeping; :meth:`config_to_json` gives the named
    wire form.
    """

    def __init__(self, params: Any) -> None:
        pairs = list(params)
        if not pairs:
            raise ValueError("search space needs at least one parameter")
        self.names: tuple[str, ...] = tuple(str(name) for name, _ in pairs)
        self.spaces: tuple[ParameterSpace, ...] = tuple(space for _, space in pairs)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"parameter names must be unique, got {self.names}")
        for space in self.spaces:
            if not isinstance(space, ParameterSpace):
                raise TypeError(f"not a parameter space: {space!r}")

    def __len__(self) -> int:
        return len(self.spaces)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={s.kind}" for n, s in zip(self.names, self.spaces))
        return f"SearchSpace({inner})"

    def size(self) -> int:
        """Total number of configurations (exact, arbitrary precision)."""
        return math.prod(space.size() for space in self.spaces)

    def contains(self, config: Any) -> bool:
        return (
            isinstance(config, tuple)
            and len(config) == len(self.spaces)
            and all(s.contains(v) for s, v in zip(self.spaces, config))
        )

    def require(self, config: Any) -> None:
        if not (isinstance(config, tuple) and len(config) == len(self.spaces)):
            raise ValueError(f"expected a {len(self.spaces)}-tuple configuration, got {config!r}")
        for name, space, value in zip(self.names, self.spaces, config):
            try:
                space.require(value)
            except ValueError as err:
                raise ValueError(f"parameter {name!r}: {err}") from None

    def sample_uniform(self, rng: np.random.Generator) -> tuple:
        return tuple(space.sample_uniform(rng) for space in self.spaces)

    def unrank(self, index: int) -> tuple:
        """The ``index``-th configuration; first parameter is most significant."""
        if not 0 <= index < self.size():
            raise IndexError(f"rank {index} out of range for size {self.size()}")
        out = []
        for space in reversed(self.spaces):
            index, r = divmod(index, space.size())
            out.append(space.unrank(r))
        return tuple(reversed(out))

    def iter_configs(self, cap: int | None = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple]:
        """Iterate every configuration in canonical order; refuses above ``cap``."""
        total = self.size()
        if cap is not None and total > cap:
            raise ValueError(f"search space has {total} configurations, above the cap {cap}")
        # Each per-parameter size divides the total, so `total` bounds them all.
        per_param = [space.enumerate(cap=total) for space in self.spaces]

        def rec(prefix: tuple, rest: list[list[Any]]) -> Iterator[tuple]:
            if not rest:
                yield prefix
                return
            for v in rest[0]:
                yield from rec(prefix + (v,), rest[1:])

        return rec((), per_param)

    def single_move_neighbors(self, config: tuple) -> list[tuple]:
        """Configurations differing from ``config`` in exactly one parameter step."""
        self.require(config)
        out = []
        for i, (space, value) in enumerate(zip(self.spaces, config)):
            for w in space.neighbors(value):
                out.append(config[:i] + (w,) + config[i + 1 :])
        return out

    def config_to_json(self, config: tuple) -> dict[str, Any]:
        return {
            name: space.value_to_json(value)
            for name, space, value in zip(self.names, self.spaces, config)
        }

    def config_from_json(self, obj: dict[str, Any]) -> tuple:
        missing = [n for n in self.names if n not in obj]
        if missing:
            raise ValueError(f"configuration is missing parameters {missing}")
        return tuple(
            space.value_from_json(obj[name]) for name, space in zip(self.names, self.spaces)
        )

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {"name": name, **parameter_space_to_json(space)}
            for name, space in zip(self.names, self.spaces)
        ]

    @classmethod
    def from_json(cls, obj: Any) -> "SearchSpace":
        if not isinstance(obj, list):
            raise ValueError("search space declaration must be a JSON array")
        pairs = []
        for entry in obj:
            if not isinstance(entry, dict) or "name" not in entry:
                raise ValueError(f"each parameter needs a 'name' field, got {entry!r}")
            pairs.append((entry["name"], parameter_space_from_json(entry)))
        return cls(pairs)

    @classmethod
    def from_file(cls, path: str) -> "SearchSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


class TopologyGraph:
    """A parameter space materialized as an explicit undirected graph.

    Vertices are indexed in canonical enumeration order; adjacency lists hold
    sorted vertex indices and agree exactly with ``neighbors`` on every
    vertex.
    """

    def __init__(self, vertices: list[Any], adjacency: list[list[int]]) -> None:
        self.vertices = vertices
        self.adjacency = adjacency
        self._index = {v: i for i, v in enumerate(vertices)}

    def __len__(self) -> int:
        return len(self.vertices)

    def index_of(self, value: Any) -> int:
        try:
            return self._index[value]
        except KeyError:
            raise ValueError(f"{value!r} is not a vertex of this graph") from None

    def degree(self, index: int) -> int:
        return len(self.adjacency[index])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]


def build_graph(space: ParameterSpace, cap: int = DEFAULT_ENUMERATION_CAP) -> TopologyGraph:
    """Materialize the full topology graph of one parameter space."""
    vertices = space.enumerate(cap=cap)
    index = {v: i for i, v in enumerate(vertices)}
    adjacency = [sorted(index[w] for w in space.neighbors(v)) for v in vertices]
    return TopologyGraph(vertices, adjacency)


def is_connected(graph: TopologyGraph) -> bool:
    """True when every vertex is reachable from vertex 0 (BFS)."""
    n = len(graph)
    if n == 0:
        return True
    seen = {0}
    queue = [0]
    while queue:
        u = queue.pop()
        for w in graph.adjacency[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def sample_unvisited(
    space: SearchSpace,
    visited: set[tuple],
    rng: np.random.Generator,
    attempts: int = 1000,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple | None:
    """A uniformly random configuration outside ``visited``, or None if none exist.

    Tries rejection sampling first; for enumerable spaces falls back to
    unranking a uniform index over the unvisited remainder.  Raises
    ``RuntimeError`` in the (practically unreachable) case where rejection
    fails on a space too large to enumerate.
    """
    total = space.size()
    remaining = total - len(visited)
    if remaining <= 0:
        return None
    for _ in range(attempts):
        config = space.sample_uniform(rng)
        if config not in visited:
            return config
    if total <= cap:
        skip = uniform_index(rng, remaining)
        for config in space.iter_configs(cap=cap):
            if config in visited:
                continue
            if skip == 0:
                return config
            skip -= 1
    raise RuntimeError(
        "failed to draw an unvisited configuration by rejection from a space "
        "too large to enumerate"
    )
