import math
from dataclasses import dataclass, field

import numpy as np

from .bits import popcounts
from .cube_config import BOOLEAN_ATOL, DEFAULT_TOLERANCE, n_cap


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class BiasedCube:
    """
    The discrete cube {0,1}^n under the product measure in which each coordinate is 1 with probability p.

    By default p must lie in (0, 1/2]; functions of larger bias are handled through their duals.
    ``allow_upper`` admits the whole range (0, 1), which the dual functions, the targets of directed
    operators and threshold curves need.
    """

    n: int
    p: float
    allow_upper: bool = field(default=False, compare=False)

    def __post_init__(self):
        cap = n_cap()
        if not isinstance(self.n, int | np.integer) or self.n < 0:
            raise ValueError(f"Cube dimension must be a non-negative integer, got {self.n!r}.")
        if self.n > cap:
            raise ValueError(f"Cube dimension {self.n} exceeds the cap {cap} (raise it with PCUBE_NCAP).")
        if self.allow_upper:
            if not 0.0 < self.p < 1.0:
                raise ValueError(f"Bias p must lie in (0, 1), got {self.p}.")
        elif not 0.0 < self.p <= 0.5:
            raise ValueError(
                f"Bias p must lie in (0, 1/2], got {self.p}. Dualize f*(x) = 1 - f(1 - x) to work with p > 1/2."
            )

    @property
    def sigma(self) -> float:
        return math.sqrt(self.p * (1.0 - self.p))

    @property
    def size(self) -> int:
        return 1 << self.n

    def with_dimension(self, n: int) -> "BiasedCube":
        return BiasedCube(n, self.p, allow_upper=self.allow_upper)


@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A real function on the cube, stored as a dense read-only table of 2^n values."""

    cube: BiasedCube
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.size != self.cube.size:
            raise ValueError(f"Expected {self.cube.size} values for n={self.cube.n}, got {arr.size}.")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.cube.n

    def is_boolean(self) -> bool:
        v = self.values
        return bool(np.all(np.isclose(v, 0.0, atol=BOOLEAN_ATOL) | np.isclose(v, 1.0, atol=BOOLEAN_ATOL)))

    def is_signed_boolean(self) -> bool:
        v = np.abs(self.values)
        return bool(np.all(np.isclose(v, 0.0, atol=BOOLEAN_ATOL) | np.isclose(v, 1.0, atol=BOOLEAN_ATOL)))

    def with_values(self, values) -> "CubeFunction":
        return CubeFunction(self.cube, values)


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """The 2^n p-biased Fourier coefficients; entry m is the coefficient of the character of subset m."""

    cube: BiasedCube
    coeffs: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.coeffs)
        if arr.size != self.cube.size:
            raise ValueError(f"Expected {self.cube.size} coefficients for n={self.cube.n}, got {arr.size}.")
        object.__setattr__(self, "coeffs", arr)

    @property
    def n(self) -> int:
        return self.cube.n

    @classmethod
    def from_terms(cls, cube: BiasedCube, terms: dict[int, float]) -> "SpectralForm":
        coeffs = np.zeros(cube.size)
        for mask, value in terms.items():
            if not 0 <= mask < cube.size:
                raise ValueError(f"Subset mask {mask} is outside the cube of dimension {cube.n}.")
            coeffs[mask] = value
        return cls(cube, coeffs)

    def with_coeffs(self, coeffs) -> "SpectralForm":
        return SpectralForm(self.cube, coeffs)

    def degree(self, atol: float = 1e-12) -> int:
        support = np.flatnonzero(np.abs(self.coeffs) > atol)
        if support.size == 0:
            return 0
        return int(popcounts(self.n)[support].max())


@dataclass(frozen=True)
class BoundCheck:
    """
    One side-by-side comparison lhs <= rhs.

    ``passed`` uses a relative tolerance: margin >= -tolerance * max(1, |lhs|, |rhs|).
    """

    lhs: float
    rhs: float
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.lhs), abs(self.rhs))

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tolerance * self.scale
