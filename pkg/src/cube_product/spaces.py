"""
Finite product probability spaces and the functions on them.

A point of Omega_0 x ... x Omega_{n-1} is stored at the mixed-radix index
sum_t digit_t * prod_{u<t} |Omega_u|, so digit 0 varies fastest. On an all-binary space with
nu_t = (1 - p, p) this is exactly the bit layout of the cube, atom 1 playing x_t = 1.
"""

import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from cube_core.cube_config import n_cap
from cube_core.models import CubeFunction

from .product_config import SUM_TO_ONE_ATOL


@dataclass(frozen=True)
class ProductSpace:
    """
    prod_t (Omega_t, nu_t), each factor given by its probability vector.

    Every factor needs its smallest atom p_t strictly below 1/2; a binary factor with
    nu = (1/2, 1/2) or a single-atom factor is rejected.
    """

    factors: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        factors = tuple(tuple(float(a) for a in nu) for nu in self.factors)
        object.__setattr__(self, "factors", factors)
        for t, nu in enumerate(factors):
            if len(nu) < 2:
                raise ValueError(f"Factor {t} needs at least two atoms, got {len(nu)}.")
            if min(nu) <= 0.0:
                raise ValueError(f"Factor {t} has a non-positive atom probability: {nu}.")
            if abs(math.fsum(nu) - 1.0) > SUM_TO_ONE_ATOL:
                raise ValueError(f"Factor {t} must sum to 1, got {math.fsum(nu)}.")
            if not min(nu) < 0.5:
                raise ValueError(
                    f"Factor {t} has smallest atom {min(nu)}, which must lie below 1/2. "
                    "A uniform binary factor is the p = 1/2 cube; merge or split atoms to leave it."
                )
        limit = 1 << n_cap()
        if math.prod(self.arities) > limit:
            raise ValueError(f"The space has {math.prod(self.arities)} points, more than the cap {limit}.")

    @classmethod
    def binary(cls, n: int, p: float) -> "ProductSpace":
        """The p-biased cube as a product space, atom 1 carrying probability p."""
        return cls(tuple((1.0 - p, p) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(len(nu) for nu in self.factors)

    @property
    def size(self) -> int:
        return math.prod(self.arities)

    @property
    def min_atoms(self) -> tuple[float, ...]:
        """p_t, the smallest atom probability of each factor."""
        return tuple(min(nu) for nu in self.factors)

    @property
    def p(self) -> float:
        return min(self.min_atoms, default=0.5)

    @property
    def sigmas(self) -> tuple[float, ...]:
        return tuple(math.sqrt(p * (1.0 - p)) for p in self.min_atoms)

    def stride(self, t: int) -> int:
        return math.prod(self.arities[:t])

    @cached_property
    def weights(self) -> np.ndarray:
        """The probability of every point, in mixed-radix order."""
        return reduce(lambda acc, nu: np.kron(np.asarray(nu), acc), self.factors, np.ones(1))

    def digits(self, t: int) -> np.ndarray:
        """digit_t of every point."""
        return np.arange(self.size) // self.stride(t) % self.arities[t]

    def is_binary(self) -> bool:
        return all(a == 2 for a in self.arities)


def digit_view(tables: np.ndarray, space: ProductSpace, t: int) -> np.ndarray:
    """
    Reshapes a (k, size) stack of tables so that axis 2 is digit t.

    ``view[:, :, d, :]`` holds the entries with digit_t = d; a view when the stack is contiguous.
    """
    return tables.reshape(tables.shape[0], -1, space.arities[t], space.stride(t))


def condition_out(tables: np.ndarray, space: ProductSpace, t: int) -> np.ndarray:
    """E_t on every row of a (k, size) stack: averages coordinate t out under nu_t."""
    view = digit_view(tables, space, t)
    mean = np.einsum("kbai,a->kbi", view, np.asarray(space.factors[t]))
    return np.broadcast_to(mean[:, :, None, :], view.shape).reshape(tables.shape)


def _frozen(values, size: int) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    if arr.size != size:
        raise ValueError(f"Expected {size} values for this product space, got {arr.size}.")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ProductFunction:
    space: ProductSpace
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.space.size))

    @classmethod
    def from_cube(cls, f: CubeFunction) -> "ProductFunction":
        return cls(ProductSpace.binary(f.n, f.cube.p), f.values)

    def with_values(self, values) -> "ProductFunction":
        return ProductFunction(self.space, values)

    def expectation(self) -> float:
        return float(np.dot(self.values, self.space.weights))

    def moment(self, q: float) -> float:
        """E|f|^q."""
        return float(np.dot(np.abs(self.values) ** q, self.space.weights))

    def norm(self, q: float) -> float:
        return self.moment(q) ** (1.0 / q)

    def inner(self, other: "ProductFunction") -> float:
        if other.space != self.space:
            raise ValueError("Inner products need functions on the same product space.")
        return float(np.dot(self.values * other.values, self.space.weights))

    def condition_out(self, t: int) -> "ProductFunction":
        return self.with_values(condition_out(self.values[None, :], self.space, t)[0])

    def dependence_gap(self, mask: int) -> float:
        """max over t outside mask of max|E_t f - f|; zero when f depends only on the mask."""
        gap = 0.0
        for t in range(self.space.n):
            if not mask >> t & 1:
                gap = max(gap, float(np.max(np.abs(self.condition_out(t).values - self.values))))
        return gap


def random_space(seed: int, n: int, max_arity: int = 4) -> ProductSpace:
    """n factors of arity 2..max_arity with random atom probabilities."""
    if max_arity < 2:
        raise ValueError(f"max_arity must be at least 2, got {max_arity}.")
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(n):
        raw = rng.random(int(rng.integers(2, max_arity + 1))) + 0.5
        nu = raw / raw.sum()
        if not nu.min() < 0.5:
            nu = np.array([0.4, 0.6])
        factors.append(tuple(float(a) for a in nu))
    return ProductSpace(tuple(factors))


def random_product_function(space: ProductSpace, seed: int, boolean: bool = False) -> ProductFunction:
    rng = np.random.default_rng(seed)
    if boolean:
        return ProductFunction(space, rng.integers(0, 2, size=space.size).astype(float))
    return ProductFunction(space, rng.standard_normal(space.size))
