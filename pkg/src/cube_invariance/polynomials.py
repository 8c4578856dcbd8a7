"""
Multilinear polynomials f(v) = sum_S fhat(S) v_S evaluated on independent inputs.

Since every input has mean 0 and variance 1, E[f(X)^2] = W_empty(f) = sum_S fhat(S)^2 for every
ensemble, and I_S(f) = W_S(f) prod_{i in S} sigma_i^{-2} with W_S the coefficient mass above S.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cube_core.bits import members, subset_products, superset_sums
from cube_core.cube_config import n_cap
from cube_core.models import SpectralForm

from .ensembles import Ensemble
from .invariance_config import EXACT_SUPPORT_CAP

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    n: int
    terms: tuple[tuple[int, float], ...]  # (mask, coefficient), ascending masks, no zeros

    def __post_init__(self):
        if not 0 <= self.n <= n_cap():
            raise ValueError(f"The number of variables must lie in 0..{n_cap()}, got {self.n}.")
        merged: dict[int, float] = {}
        for mask, value in self.terms:
            if not 0 <= mask < 1 << self.n:
                raise ValueError(f"Monomial mask {mask} uses variables beyond n={self.n}.")
            merged[int(mask)] = merged.get(int(mask), 0.0) + float(value)
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in merged.items() if c != 0.0)))

    @classmethod
    def from_terms(cls, n: int, terms: dict[int, float]) -> "MultilinearPoly":
        return cls(n, tuple(terms.items()))

    @classmethod
    def from_spectral(cls, F: SpectralForm) -> "MultilinearPoly":
        """The Fourier expansion of a cube function, read as a polynomial in the characters."""
        return cls(F.n, tuple((int(m), float(F.coeffs[m])) for m in np.flatnonzero(F.coeffs)))

    @property
    def degree(self) -> int:
        return max((int(m).bit_count() for m, _ in self.terms), default=0)

    @cached_property
    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.n)
        for mask, value in self.terms:
            out[mask] = value
        out.flags.writeable = False
        return out

    @cached_property
    def weight_table(self) -> np.ndarray:
        """W_S(f) for every S."""
        return superset_sums(np.square(self.dense))

    @property
    def energy(self) -> float:
        """W_empty(f)."""
        return float(sum(c * c for _, c in self.terms))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """f at every row of an (m, n) array."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.n:
            raise ValueError(f"Expected points with {self.n} coordinates, got {points.shape[1]}.")
        out = np.zeros(points.shape[0])
        for mask, value in self.terms:
            out += value * np.prod(points[:, members(mask)], axis=1)
        return out


def _check_n(f: MultilinearPoly, ensemble: Ensemble) -> None:
    if ensemble.n != f.n:
        raise ValueError(f"The ensemble has {ensemble.n} coordinates but f has {f.n} variables.")


def poly_influences(f: MultilinearPoly, ensemble: Ensemble | tuple[float, ...]) -> np.ndarray:
    """I_S(f) = W_S(f) prod_{i in S} sigma_i^{-2} for every S, from an ensemble or its sigmas."""
    sigmas = ensemble.sigmas if isinstance(ensemble, Ensemble) else tuple(ensemble)
    if len(sigmas) != f.n:
        raise ValueError(f"Expected {f.n} sigmas, got {len(sigmas)}.")
    return f.weight_table * subset_products([s**-2 for s in sigmas])


def max_nonempty_influence(f: MultilinearPoly, sigmas: tuple[float, ...]) -> float:
    if f.n == 0:
        return 0.0
    return float(np.max(poly_influences(f, sigmas)[1:]))


def evaluate_on_support(f: MultilinearPoly, ensemble: Ensemble) -> tuple[np.ndarray, np.ndarray]:
    """
    f and the probability at every point of a discrete product support.

    Coordinate i is expanded from the monomial basis (1, v_i) to its atoms one at a time, so
    the values come out in mixed-radix order with coordinate 0 varying fastest.
    """
    _check_n(f, ensemble)
    if not ensemble.is_discrete:
        raise ValueError("Exact enumeration needs discrete coordinates; Gaussian inputs are sampled.")
    if ensemble.support_size() > EXACT_SUPPORT_CAP:
        raise ValueError(f"The support has {ensemble.support_size()} points, more than {EXACT_SUPPORT_CAP}.")
    table = np.array(f.dense, copy=True)
    stride = 1
    for c in ensemble.coordinates:
        basis = np.stack([np.ones(len(c.atoms)), np.asarray(c.atoms)], axis=1)
        view = table.reshape(-1, 2, stride)
        table = np.einsum("ab,hbl->hal", basis, view).reshape(-1)
        stride *= len(c.atoms)
    logger.debug("Enumerated f over %d support points", table.size)
    return table, ensemble.weights()
