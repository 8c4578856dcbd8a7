"""
Input ensembles for multilinear polynomials.

Every coordinate has mean 0 and variance 1, and carries a sigma with E|X_i|^3 <= 1/sigma.
Discrete coordinates can be enumerated exactly; Gaussian ones are only ever sampled.
"""

import math
from dataclasses import dataclass

import numpy as np

from .invariance_config import GAUSSIAN_SIGMA_MAX, GAUSSIAN_THIRD_MOMENT, MOMENT_ATOL

PBIASED = "pbiased"
UNIFORM = "uniform"
GAUSSIAN = "gaussian"
DISCRETE = "discrete"


@dataclass(frozen=True)
class CoordinateDistribution:
    kind: str
    atoms: tuple[float, ...]  # empty for GAUSSIAN
    probs: tuple[float, ...]
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}.")
        if self.kind == GAUSSIAN:
            return
        if len(self.atoms) != len(self.probs) or not self.atoms:
            raise ValueError("A discrete coordinate needs one probability per atom.")
        if min(self.probs) <= 0.0 or abs(math.fsum(self.probs) - 1.0) > MOMENT_ATOL:
            raise ValueError(f"Atom probabilities must be positive and sum to 1, got {self.probs}.")
        mean = math.fsum(a * w for a, w in zip(self.atoms, self.probs, strict=True))
        variance = math.fsum(a * a * w for a, w in zip(self.atoms, self.probs, strict=True))
        if abs(mean) > MOMENT_ATOL or abs(variance - 1.0) > MOMENT_ATOL:
            raise ValueError(f"Coordinates need mean 0 and variance 1, got mean {mean} and variance {variance}.")
        if self.third_moment() > (1.0 + 1e-12) / self.sigma:
            raise ValueError(
                f"E|X|^3 = {self.third_moment():.6g} exceeds 1/sigma = {1.0 / self.sigma:.6g}; lower sigma."
            )

    @property
    def is_discrete(self) -> bool:
        return self.kind != GAUSSIAN

    def third_moment(self) -> float:
        if self.kind == GAUSSIAN:
            return GAUSSIAN_THIRD_MOMENT
        return math.fsum(abs(a) ** 3 * w for a, w in zip(self.atoms, self.probs, strict=True))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """One uniform (or one normal) draw per sample, so streams stay aligned across ensembles."""
        if self.kind == GAUSSIAN:
            return rng.standard_normal(size)
        cumulative = np.cumsum(self.probs)
        index = np.searchsorted(cumulative, rng.random(size), side="right")
        return np.asarray(self.atoms)[np.minimum(index, len(self.atoms) - 1)]


def pbiased(p: float) -> CoordinateDistribution:
    """The p-biased character (x - p) / sigma with x ~ Bernoulli(p)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}.")
    sigma = math.sqrt(p * (1.0 - p))
    return CoordinateDistribution(PBIASED, (-p / sigma, (1.0 - p) / sigma), (1.0 - p, p), sigma)


def uniform() -> CoordinateDistribution:
    return CoordinateDistribution(UNIFORM, (-1.0, 1.0), (0.5, 0.5), 0.5)


def gaussian(sigma: float = GAUSSIAN_SIGMA_MAX) -> CoordinateDistribution:
    if not 0.0 < sigma <= GAUSSIAN_SIGMA_MAX * (1.0 + 1e-12):
        raise ValueError(f"A Gaussian coordinate admits sigma in (0, {GAUSSIAN_SIGMA_MAX:.6g}], got {sigma}.")
    return CoordinateDistribution(GAUSSIAN, (), (), sigma)


def discrete(atoms, probs, sigma: float | None = None) -> CoordinateDistribution:
    """A custom coordinate; sigma defaults to the largest admissible value 1 / E|X|^3."""
    atoms = tuple(float(a) for a in atoms)
    probs = tuple(float(w) for w in probs)
    if sigma is None:
        if len(atoms) != len(probs) or not atoms:
            raise ValueError("A discrete coordinate needs one probability per atom.")
        sigma = 1.0 / math.fsum(abs(a) ** 3 * w for a, w in zip(atoms, probs, strict=True))
    return CoordinateDistribution(DISCRETE, atoms, probs, sigma)


@dataclass(frozen=True)
class Ensemble:
    coordinates: tuple[CoordinateDistribution, ...]

    @classmethod
    def iid(cls, coordinate: CoordinateDistribution, n: int) -> "Ensemble":
        return cls((coordinate,) * n)

    @property
    def n(self) -> int:
        return len(self.coordinates)

    @property
    def sigmas(self) -> tuple[float, ...]:
        return tuple(c.sigma for c in self.coordinates)

    @property
    def is_discrete(self) -> bool:
        return all(c.is_discrete for c in self.coordinates)

    def support_size(self) -> float:
        """Points of the product support; infinite once a Gaussian coordinate appears."""
        if not self.is_discrete:
            return math.inf
        return math.prod(len(c.atoms) for c in self.coordinates)

    def weights(self) -> np.ndarray:
        """Probabilities of the support points, coordinate 0 varying fastest."""
        out = np.ones(1)
        for c in self.coordinates:
            out = np.kron(np.asarray(c.probs), out)
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """A (size, n) array; coordinates are drawn in order from the same stream."""
        out = np.empty((size, self.n))
        for i, c in enumerate(self.coordinates):
            out[:, i] = c.sample(rng, size)
        return out


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise ValueError(f"Malformed {what} list {text!r}.") from e


def parse_coordinate(spec: str) -> CoordinateDistribution:
    """
    One of ``pbiased:<p>``, ``uniform``, ``gaussian[:<sigma>]`` or
    ``discrete:<a1>,<a2>,...@<w1>,<w2>,...``.
    """
    kind, _, arg = spec.strip().partition(":")
    kind = kind.strip().lower()
    try:
        if kind == PBIASED and arg:
            return pbiased(float(arg))
        if kind == UNIFORM and not arg:
            return uniform()
        if kind == GAUSSIAN:
            return gaussian(float(arg)) if arg else gaussian()
    except ValueError as e:
        raise ValueError(f"Malformed ensemble spec {spec!r}: {e}") from e
    if kind == DISCRETE and "@" in arg:
        atoms, _, probs = arg.partition("@")
        return discrete(_floats(atoms, "atom"), _floats(probs, "probability"))
    raise ValueError(
        f"Unknown ensemble spec {spec!r}; use pbiased:<p>, uniform, gaussian[:<sigma>] or discrete:<atoms>@<probs>."
    )


def parse_ensemble(spec: str, n: int) -> Ensemble:
    return Ensemble.iid(parse_coordinate(spec), n)
