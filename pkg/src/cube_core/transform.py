"""
The p-biased Fourier transform and the basic functionals of the cube.

Every function expands as f = sum_S fhat(S) chi_S with chi_S = prod_{i in S} (x_i - p) / sigma.
The forward transform makes one pass of two-point butterflies per coordinate, mapping the
pair (f0, f1) of values with coordinate i at 0 and at 1 to (p f1 + (1 - p) f0, sigma (f1 - f0)).
Both transforms also accept one bias per coordinate; that form only serves the mixed
product measures of the hyper module.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from functools import lru_cache

import numpy as np

from .bits import dimension_of, pair_view, popcounts, superset_sums
from .cube_config import BOOLEAN_ATOL
from .models import BiasedCube, CubeFunction, SpectralForm

logger = logging.getLogger(__name__)


def _check_biases(size: int, biases: Sequence[float]) -> None:
    n = dimension_of(size)
    if len(biases) != n:
        raise ValueError(f"Expected one bias per coordinate ({n}), got {len(biases)}.")
    for p in biases:
        if not 0.0 < p < 1.0:
            raise ValueError(f"Every bias must lie in (0, 1), got {p}.")


def forward_butterflies(values, biases: Sequence[float]) -> np.ndarray:
    """Values to coefficients, coordinate i carrying the biases[i]-biased character."""
    out = np.array(values, dtype=float, copy=True).reshape(-1)
    _check_biases(out.size, biases)
    for i, p in enumerate(biases):
        sigma = math.sqrt(p * (1.0 - p))
        v = pair_view(out, i)
        f0 = v[:, 0, :].copy()
        f1 = v[:, 1, :].copy()
        v[:, 0, :] = (1.0 - p) * f0 + p * f1
        v[:, 1, :] = sigma * (f1 - f0)
    return out


def inverse_butterflies(coeffs, biases: Sequence[float]) -> np.ndarray:
    """Coefficients to values; the exact inverse of forward_butterflies."""
    out = np.array(coeffs, dtype=float, copy=True).reshape(-1)
    _check_biases(out.size, biases)
    for i, p in enumerate(biases):
        sigma = math.sqrt(p * (1.0 - p))
        v = pair_view(out, i)
        c0 = v[:, 0, :].copy()
        c1 = v[:, 1, :].copy()
        v[:, 0, :] = c0 - c1 * (p / sigma)
        v[:, 1, :] = c0 + c1 * ((1.0 - p) / sigma)
    return out


def product_weights(biases: Sequence[float]) -> np.ndarray:
    """Probability of every point under the product measure with the given per-coordinate biases."""
    w = np.ones(1)
    for p in biases:
        w = np.concatenate([w * (1.0 - p), w * p])
    return w


@lru_cache(maxsize=64)
def _weights(n: int, p: float) -> np.ndarray:
    w = product_weights([p] * n)
    w.flags.writeable = False
    return w


def cube_weights(cube: BiasedCube) -> np.ndarray:
    """The read-only vector of mu_p(x) over all points x."""
    return _weights(cube.n, cube.p)


def forward_transform(f: CubeFunction) -> SpectralForm:
    """
    Computes the p-biased Fourier coefficients of f in O(n 2^n).

    The dictator x_0 has coefficients p on the empty set and sigma on {0}, since x_0 = p + sigma chi_0.
    """
    coeffs = forward_butterflies(f.values, [f.cube.p] * f.n)
    return SpectralForm(f.cube, coeffs)


def inverse_transform(F: SpectralForm) -> CubeFunction:
    values = inverse_butterflies(F.coeffs, [F.cube.p] * F.n)
    return CubeFunction(F.cube, values)


def mu_measure(f: CubeFunction) -> float:
    """E_{mu_p}[f]; for a boolean f this is its measure."""
    return float(np.dot(f.values, cube_weights(f.cube)))


def lr_norm(f: CubeFunction, r: float) -> float:
    """(E_{mu_p} |f|^r)^{1/r} for r >= 1."""
    if not r >= 1:
        raise ValueError(f"The L^r norm needs r >= 1, got {r}.")
    moment = float(np.dot(np.abs(f.values) ** r, cube_weights(f.cube)))
    return moment ** (1.0 / r)


def inner(f: CubeFunction, g: CubeFunction) -> float:
    """E_{mu_p}[f g]."""
    if f.cube != g.cube:
        raise ValueError(f"Functions live on different cubes: {f.cube} and {g.cube}.")
    return float(np.dot(f.values * g.values, cube_weights(f.cube)))


def restrict(f: CubeFunction, S: Iterable[int], x: Iterable[int]) -> CubeFunction:
    """
    Fixes the coordinates in S to the bits in x and returns f_{S->x}.

    The remaining coordinates keep their relative order and are renumbered from 0.
    """
    coords = [int(i) for i in S]
    bits = [int(b) for b in x]
    if len(coords) != len(bits):
        raise ValueError(f"Assignment covers {len(bits)} coordinates but S has {len(coords)}.")
    if len(set(coords)) != len(coords):
        raise ValueError(f"Restricted coordinates must be distinct, got {coords}.")
    n = f.n
    for i in coords:
        if not 0 <= i < n:
            raise ValueError(f"Coordinate {i} is outside the cube of dimension {n}.")
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"Assigned values must be bits, got {b}.")
    if not coords:
        return f

    table = f.values.reshape((2,) * n)
    # Axis k of the reshaped table is bit n - 1 - k.
    index: list[int | slice] = [slice(None)] * n
    for i, b in zip(coords, bits, strict=True):
        index[n - 1 - i] = b
    sub = np.ascontiguousarray(table[tuple(index)]).reshape(-1)
    return CubeFunction(f.cube.with_dimension(n - len(coords)), sub)


def restricted_measures(f: CubeFunction) -> np.ndarray:
    """
    Returns the table J -> E[f_{J->1}] over every subset J.

    E[f | x_J = 1] = (sum over x containing J of f(x) mu_p(x)) / p^|J|, so one superset
    zeta transform of f * mu_p yields every restriction at once.
    """
    sums = superset_sums(f.values * cube_weights(f.cube))
    return sums / f.cube.p ** popcounts(f.n)


def dual(f: CubeFunction) -> CubeFunction:
    """f*(x) = 1 - f(1 - x), living on the cube of bias 1 - p."""
    cube = BiasedCube(f.n, 1.0 - f.cube.p, allow_upper=True)
    # Complementing every bit reverses the index order.
    return CubeFunction(cube, 1.0 - f.values[::-1])


def is_monotone(f: CubeFunction, atol: float = BOOLEAN_ATOL) -> bool:
    for i in range(f.n):
        v = pair_view(f.values, i)
        if np.any(v[:, 1, :] < v[:, 0, :] - atol):
            return False
    return True
