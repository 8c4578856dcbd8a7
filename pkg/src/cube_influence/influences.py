"""
Discrete derivatives and generalised influences.

For a subset S the unscaled difference is the alternating sum of the restrictions of f over
{0,1}^S; the derivative D_S f is that sum times sigma^|S| and I_S(f) is its squared 2-norm
without the scaling. Spectrally, ||D_S f||^2 = sum over E containing S of fhat(E)^2, so a single
superset zeta transform of the squared coefficients gives every I_S at once.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from cube_core.bits import mask_of, members, pair_view, popcounts, superset_sums
from cube_core.cube_config import DEFAULT_R_MAX
from cube_core.models import BiasedCube, CubeFunction, SpectralForm
from cube_core.transform import cube_weights, forward_transform

logger = logging.getLogger(__name__)

SPECTRAL = "spectral"
DEFINITION = "definition"


def _coords(f: CubeFunction, S: Iterable[int]) -> list[int]:
    coords = sorted({int(i) for i in S})
    for i in coords:
        if not 0 <= i < f.n:
            raise ValueError(f"Coordinate {i} is outside the cube of dimension {f.n}.")
    return coords


def _unscaled_difference(values: np.ndarray, coords: Iterable[int]) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    for i in coords:
        v = pair_view(out, i)
        d = v[:, 1, :] - v[:, 0, :]
        v[:, 0, :] = d
        v[:, 1, :] = d
    return out


def derivative(f: CubeFunction, S: Iterable[int]) -> CubeFunction:
    """
    D_S f as a function on the full cube; it does not depend on the coordinates in S.

    D_S f equals sum over T containing S of fhat(T) chi_{T \\ S}.
    """
    coords = _coords(f, S)
    values = _unscaled_difference(f.values, coords) * f.cube.sigma ** len(coords)
    return f.with_values(values)


def derivative_norms(F: SpectralForm) -> np.ndarray:
    """The table S -> ||D_S f||_2^2 = sum over E containing S of fhat(E)^2."""
    return superset_sums(np.square(F.coeffs))


def influence_spectrum(f: CubeFunction | SpectralForm) -> np.ndarray:
    """The table S -> I_S(f) over every subset S."""
    F = f if isinstance(f, SpectralForm) else forward_transform(f)
    return derivative_norms(F) / F.cube.sigma ** (2 * popcounts(F.n))


def gen_influence(f: CubeFunction, S: Iterable[int], method: str = SPECTRAL) -> float:
    """
    The generalised influence I_S(f).

    ``method="definition"`` squares the alternating sum of restrictions directly; the default
    goes through the Fourier identity.
    """
    coords = _coords(f, S)
    if method == DEFINITION:
        diff = _unscaled_difference(f.values, coords)
        return float(np.dot(np.square(diff), cube_weights(f.cube)))
    if method != SPECTRAL:
        raise ValueError(f"Unknown influence method {method!r}; use {SPECTRAL!r} or {DEFINITION!r}.")
    return float(influence_spectrum(f)[mask_of(coords)])


@dataclass(frozen=True)
class GeneralizedInfluenceTable:
    """I_S(f) for every |S| <= r_max, keyed by subset mask."""

    cube: BiasedCube
    table: dict[int, float]
    r_max: int

    def __getitem__(self, mask: int) -> float:
        return self.table[mask]

    def largest(self, nonempty: bool = True) -> tuple[int, float]:
        """The subset with the largest influence; the lowest mask wins ties."""
        best_mask, best = -1, -np.inf
        for mask in sorted(self.table):
            if nonempty and mask == 0:
                continue
            if self.table[mask] > best:
                best_mask, best = mask, self.table[mask]
        return best_mask, float(best)

    def rows(self) -> list[dict]:
        return [
            {"S_mask": mask, "S": members(mask), "I_S": value}
            for mask, value in sorted(self.table.items())
        ]


def influence_table(f: CubeFunction, r_max: int = DEFAULT_R_MAX, full: bool = False) -> GeneralizedInfluenceTable:
    """Materializes I_S(f) for |S| <= r_max, or for every S when ``full`` is set."""
    spectrum = influence_spectrum(f)
    limit = f.n if full else min(r_max, f.n)
    keep = np.flatnonzero(popcounts(f.n) <= limit)
    logger.debug("Influence table for n=%d keeps %d subsets", f.n, keep.size)
    return GeneralizedInfluenceTable(f.cube, {int(m): float(spectrum[m]) for m in keep}, limit)


def total_influence(f: CubeFunction, method: str = SPECTRAL) -> float:
    """I(f) = sum_i I_i(f) = sigma^{-2} sum_S |S| fhat(S)^2."""
    if method == DEFINITION:
        return _total_influence_on(f.values, f.cube)
    if method != SPECTRAL:
        raise ValueError(f"Unknown influence method {method!r}; use {SPECTRAL!r} or {DEFINITION!r}.")
    F = forward_transform(f)
    return float(np.dot(popcounts(f.n), np.square(F.coeffs)) / f.cube.sigma**2)


def _total_influence_on(values: np.ndarray, cube: BiasedCube) -> float:
    weights = cube_weights(cube)
    total = 0.0
    for i in range(cube.n):
        diff = _unscaled_difference(values, [i])
        total += float(np.dot(np.square(diff), weights))
    return total


def total_influence_at(f: CubeFunction, p: float) -> float:
    """Total influence of the same table under mu_p for any p in (0, 1)."""
    return _total_influence_on(f.values, BiasedCube(f.n, p, allow_upper=True))


def flip_influence(f: CubeFunction) -> float:
    """sum_i Pr[f(x xor e_i) != f(x)] for a boolean f."""
    if not f.is_boolean():
        raise ValueError("Flip influence is defined for boolean functions only.")
    idx = np.arange(f.cube.size)
    weights = cube_weights(f.cube)
    total = 0.0
    for i in range(f.n):
        changed = f.values[idx ^ (1 << i)] != f.values
        total += float(weights[changed].sum())
    return total


def beta_small_check(f: CubeFunction, r_max: int | None = None) -> float:
    """
    Returns the smallest beta with I_S(f) <= beta E[f^2] for every |S| <= r_max (all S when None).

    Raises ValueError for the zero function.
    """
    energy = float(np.dot(np.square(f.values), cube_weights(f.cube)))
    if energy <= 0.0:
        raise ValueError("beta is undefined for the zero function (E[f^2] = 0).")
    spectrum = influence_spectrum(f)
    if r_max is not None:
        spectrum = spectrum[popcounts(f.n) <= r_max]
    return float(spectrum.max() / energy)
