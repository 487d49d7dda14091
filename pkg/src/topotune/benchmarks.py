"""Tensor-operator benchmark search spaces and a synthetic GPU cost model.

Three operator families are provided, each mapped to a search space of
tiling-style parameters:

* MatMul -- N and M factored into four pieces, K into three;
* BatchMatMul -- additionally factors the batch dimension into two pieces;
* Conv2D -- six factorization parameters (output channels / height / width
  into four pieces, input channels and the two kernel dims into two), plus a
  categorical explicit-unroll switch and a discrete unroll-step limit.

The cost model is openly synthetic: a deterministic, parameterized stand-in
for hardware measurement.  It produces a landscape with a hierarchical
factorization structure, an invalid region (scored 0, like a failed
compilation), and smooth ridges aligned with the neighborhood topology, so
that topology-aware search has something real to exploit.  Scores are on an
arbitrary throughput-like scale and carry no hardware meaning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .spaces import Categorical, Discrete, Factorization, SearchSpace

UNROLL_ON = "explicit_unroll_on"
UNROLL_OFF = "explicit_unroll_off"

# Unroll-step candidates for the discrete Conv2D parameter; a harness
# constant chosen to span "off" through aggressive unrolling.
UNROLL_STEPS = (0, 16, 64, 512, 1500)


@dataclass(frozen=True)
class MatMulSpec:
    """(N x K) @ (K x M) matrix multiply."""

    n: int
    m: int
    k: int

    def __post_init__(self) -> None:
        if min(self.n, self.m, self.k) < 1:
            raise ValueError(f"matmul dimensions must be >= 1, got {self}")

    def id(self) -> str:
        return f"matmul:{self.n},{self.m},{self.k}"


@dataclass(frozen=True)
class BatchMatMulSpec:
    """Batched (N x K) @ (K x M) multiply over batch size B."""

    b: int
    n: int
    m: int
    k: int

    def __post_init__(self) -> None:
        if min(self.b, self.n, self.m, self.k) < 1:
            raise ValueError(f"batchmatmul dimensions must be >= 1, got {self}")

    def id(self) -> str:
        return f"batchmatmul:{self.b},{self.n},{self.m},{self.k}"


@dataclass(frozen=True)
class Conv2dSpec:
    """Direct 2D convolution of an image tensor with a kernel tensor."""

    batch: int
    in_channels: int
    in_height: int
    in_width: int
    out_channels: int
    kernel_h: int
    kernel_w: int
    stride: int
    padding: int

    def __post_init__(self) -> None:
        dims = (self.batch, self.in_channels, self.in_height, self.in_width,
                self.out_channels, self.kernel_h, self.kernel_w, self.stride)
        if min(dims) < 1 or self.padding < 0:
            raise ValueError(f"invalid conv2d dimensions: {self}")
        if self.out_height < 1 or self.out_width < 1:
            raise ValueError(
                f"conv2d output is empty: out_height={self.out_height}, "
                f"out_width={self.out_width}"
            )

    @property
    def out_height(self) -> int:
        return (self.in_height + 2 * self.padding - self.kernel_h) // self.stride + 1

    @property
    def out_width(self) -> int:
        return (self.in_width + 2 * self.padding - self.kernel_w) // self.stride + 1

    def id(self) -> str:
        return (
            f"conv2d:{self.batch},{self.in_channels},{self.in_height},{self.in_width},"
            f"{self.out_channels},{self.kernel_h},{self.kernel_w},"
            f"{self.stride},{self.padding}"
        )


OperatorSpec = MatMulSpec | BatchMatMulSpec | Conv2dSpec


def matmul_space(spec: MatMulSpec) -> SearchSpace:
    if not isinstance(spec, MatMulSpec):
        raise TypeError(f"expected a MatMulSpec, got {spec!r}")
    return SearchSpace([
        ("n", Factorization(spec.n, 4)),
        ("m", Factorization(spec.m, 4)),
        ("k", Factorization(spec.k, 3)),
    ])


def batchmatmul_space(spec: BatchMatMulSpec) -> SearchSpace:
    if not isinstance(spec, BatchMatMulSpec):
        raise TypeError(f"expected a BatchMatMulSpec, got {spec!r}")
    return SearchSpace([
        ("b", Factorization(spec.b, 2)),
        ("n", Factorization(spec.n, 4)),
        ("m", Factorization(spec.m, 4)),
        ("k", Factorization(spec.k, 3)),
    ])


def conv2d_space(spec: Conv2dSpec) -> SearchSpace:
    if not isinstance(spec, Conv2dSpec):
        raise TypeError(f"expected a Conv2dSpec, got {spec!r}")
    return SearchSpace([
        ("co", Factorization(spec.out_channels, 4)),
        ("ho", Factorization(spec.out_height, 4)),
        ("wo", Factorization(spec.out_width, 4)),
        ("ci", Factorization(spec.in_channels, 2)),
        ("kh", Factorization(spec.kernel_h, 2)),
        ("kw", Factorization(spec.kernel_w, 2)),
        ("unroll_explicit", Categorical((UNROLL_ON, UNROLL_OFF))),
        ("unroll_step", Discrete(UNROLL_STEPS)),
    ])


def operator_space(spec: OperatorSpec) -> SearchSpace:
    if isinstance(spec, MatMulSpec):
        return matmul_space(spec)
    if isinstance(spec, BatchMatMulSpec):
        return batchmatmul_space(spec)
    if isinstance(spec, Conv2dSpec):
        return conv2d_space(spec)
    raise TypeError(f"unknown operator spec: {spec!r}")


def parse_operator(text: str) -> OperatorSpec:
    """Parse ``kind:d1,d2,...`` operator descriptions (e.g. ``matmul:8,8,8``)."""
    kind, _, dims_text = text.partition(":")
    try:
        dims = [int(d) for d in dims_text.split(",") if d != ""]
    except ValueError:
        raise ValueError(f"operator dimensions must be integers: {text!r}") from None
    if kind == "matmul" and len(dims) == 3:
        return MatMulSpec(*dims)
    if kind == "batchmatmul" and len(dims) == 4:
        return BatchMatMulSpec(*dims)
    if kind == "conv2d" and len(dims) == 9:
        return Conv2dSpec(*dims)
    raise ValueError(
        f"cannot parse operator {text!r}; expected matmul:N,M,K or "
        f"batchmatmul:B,N,M,K or conv2d:B,Cin,Hin,Win,Cout,Kh,Kw,S,P"
    )


@dataclass(frozen=True)
class CostModelParams:
    """Constants of the synthetic cost model.

    ``max_threads`` and ``shared_capacity`` bound the validity region
    (violations score 0).  The remaining knobs shape the valid landscape:
    occupancy peaks at ``occupancy_sweet_spot`` threads, register tiling
    saturates with constant ``register_saturation``, inner reduction splits
    outside ``preferred_inner_k`` pay ``inner_k_penalty``, and the grid
    factor saturates at ``grid_saturation`` blocks.
    """

    max_threads: int = 1024
    shared_capacity: int = 12288
    occupancy_sweet_spot: int = 256
    register_saturation: float = 16.0
    preferred_inner_k: frozenset[int] = field(default_factory=lambda: frozenset({4, 8, 16}))
    inner_k_penalty: float = 0.7
    grid_saturation: int = 60
    base_scale: float = 10.0

    def __post_init__(self) -> None:
        positive = (self.max_threads, self.shared_capacity, self.occupancy_sweet_spot,
                    self.register_saturation, self.grid_saturation, self.base_scale)
        if min(positive) <= 0:
            raise ValueError("all cost-model constants must be positive")
        if not 0.0 < self.inner_k_penalty <= 1.0:
            raise ValueError(f"inner_k_penalty must lie in (0, 1], got {self.inner_k_penalty}")


DEFAULT_COST_PARAMS = CostModelParams()


def resource_usage(
    spec: OperatorSpec, space: SearchSpace, config: tuple
) -> tuple[int, int]:
    """(threads per block, shared-buffer elements) implied by a configuration."""
    space.require(config)
    values = dict(zip(space.names, config))
    if isinstance(spec, (MatMulSpec, BatchMatMulSpec)):
        n, m, k = values["n"], values["m"], values["k"]
        threads = n[2] * m[2]
        shared = (n[2] * n[3] + m[2] * m[3]) * k[2]
        return threads, shared
    if isinstance(spec, Conv2dSpec):
        co, ho, wo = values["co"], values["ho"], values["wo"]
        ci, kh, kw = values["ci"], values["kh"], values["kw"]
        threads = co[2] * ho[2] * wo[2]
        shared = (co[2] * co[3] + ci[1]) * kh[1] * kw[1] * 8
        return threads, shared
    raise TypeError(f"unknown operator spec: {spec!r}")


def _throughput(
    threads: int,
    register_tile: int,
    grid: int,
    shared: int,
    inner_k: int,
    params: CostModelParams,
    bonus: float = 1.0,
) -> float:
    if threads > params.max_threads or shared > params.shared_capacity:
        return 0.0
    sweet = params.occupancy_sweet_spot
    occupancy = (min(threads, sweet) / sweet) * math.sqrt(sweet / max(threads, sweet))
    registers = register_tile / (register_tile + params.register_saturation)
    vectorize = 1.0 if inner_k in params.preferred_inner_k else params.inner_k_penalty
    grid_load = min(grid, params.grid_saturation) / params.grid_saturation
    return params.base_scale * occupancy * registers * vectorize * grid_load * bonus


def _cost_unchecked(
    spec: OperatorSpec, space: SearchSpace, config: tuple, params: CostModelParams
) -> float:
    values = dict(zip(space.names, config))
    if isinstance(spec, (MatMulSpec, BatchMatMulSpec)):
        n, m, k = values["n"], values["m"], values["k"]
        threads = n[2] * m[2]
        shared = (n[2] * n[3] + m[2] * m[3]) * k[2]
        register_tile = n[3] * m[3]
        grid = n[0] * m[0]
        if isinstance(spec, BatchMatMulSpec):
            grid *= values["b"][0]
        return _throughput(threads, register_tile, grid, shared, k[2], params)
    if isinstance(spec, Conv2dSpec):
        co, ho, wo = values["co"], values["ho"], values["wo"]
        ci, kh, kw = values["ci"], values["kh"], values["kw"]
        threads = co[2] * ho[2] * wo[2]
        shared = (co[2] * co[3] + ci[1]) * kh[1] * kw[1] * 8
        register_tile = co[3] * ho[3] * wo[3]
        grid = co[0] * ho[0] * wo[0]
        inner = kh[1] * kw[1]
        bonus = 1.0
        if values["unroll_explicit"] == UNROLL_ON and values["unroll_step"] >= 64:
            bonus = 1.05
        return _throughput(threads, register_tile, grid, shared, inner, params, bonus)
    raise TypeError(f"unknown operator spec: {spec!r}")


def synthetic_cost(
    spec: OperatorSpec,
    space: SearchSpace,
    config: tuple,
    params: CostModelParams = DEFAULT_COST_PARAMS,
) -> float:
    """Deterministic throughput-like score of a configuration; 0 means invalid.

    Infeasible configurations (wrong shape for the space) raise instead:
    invalidity is a property of a *feasible* configuration that exceeds the
    resource limits, mirroring a failed compilation or launch.
    """
    space.require(config)
    return _cost_unchecked(spec, space, config, params)


def make_objective(
    spec: OperatorSpec,
    space: SearchSpace | None = None,
    params: CostModelParams = DEFAULT_COST_PARAMS,
) -> tuple[SearchSpace, Callable[[tuple], float]]:
    """Bind the synthetic cost model to an operator; returns (space, objective)."""
    if space is None:
        space = operator_space(spec)
    return space, lambda config: synthetic_cost(spec, space, config, params)


def enumerate_optimum(
    spec: OperatorSpec,
    params: CostModelParams = DEFAULT_COST_PARAMS,
    cap: int = 1_000_000,
) -> tuple[tuple, float]:
    """Brute-force global optimum of the synthetic model over the whole space.

    Intended for desk-scale operators only; refuses spaces above ``cap``.
    Ties resolve to the first configuration in canonical order.
    """
    space = operator_space(spec)
    best_config: tuple | None = None
    best_fitness = -1.0
    for config in space.iter_configs(cap=cap):
        fitness = _cost_unchecked(spec, space, config, params)
        if fitness > best_fitness:
            best_config, best_fitness = config, fitness
    assert best_config is not None
    return best_config, best_fitness


# Desk-scale operators, small enough to enumerate exhaustively.
DESK_MATMUL = MatMulSpec(8, 8, 8)
DESK_BATCHMATMUL = BatchMatMulSpec(4, 4, 4, 4)
DESK_CONV2D = Conv2dSpec(1, 4, 8, 8, 8, 3, 3, 1, 1)

# Global optima of the synthetic model under DEFAULT_COST_PARAMS, frozen from
# a one-off exhaustive enumeration (see enumerate_optimum); regenerate if the
# cost model constants change.
GOLDEN_OPTIMA: dict[str, float] = {
    "matmul:8,8,8": 0.0024509803921568627,
    "batchmatmul:4,4,4,4": 0.0024509803921568627,
    "conv2d:1,4,8,8,8,3,3,1,1": 0.014411764705882353,
}
