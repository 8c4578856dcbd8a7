"""
Measure curves p -> mu_p(f) and critical probabilities.

mu_p(f) is a polynomial in p; it is evaluated exactly at each p as a dot product with the
product weight vector, never expanded into coefficients.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from cube_core.models import CubeFunction
from cube_core.transform import is_monotone, product_weights
from cube_influence.influences import total_influence_at

from .threshold_config import (
    BISECTION_MAX_ITER,
    BISECTION_TOL,
    CROSSING_SCAN_POINTS,
    CURVE_GRID,
    RUSSO_STEP,
    WIDTH_LEVELS,
)

logger = logging.getLogger(__name__)


def _measure_on_closed_interval(f: CubeFunction, p: float) -> float:
    return float(np.dot(f.values, product_weights([p] * f.n)))


def measure_at(f: CubeFunction, p: float) -> float:
    """mu_p of the table of f for any p in (0, 1), whatever the bias f was built with."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}.")
    return _measure_on_closed_interval(f, p)


def p_of(f: CubeFunction, t: float) -> float:
    """
    inf{p : mu_p(f) >= t}, found as the first crossing of a uniform scan refined by bisection.

    Returns 0 when f already reaches t at p = 0 and infinity when it never does. Where mu_p only
    touches t the crossing is located to about the square root of the rounding in mu_p.
    """
    if not 0.0 < t < 1.0:
        raise ValueError(f"The level t must lie in (0, 1), got {t}.")
    scan = np.linspace(0.0, 1.0, CROSSING_SCAN_POINTS)
    reached = [k for k, p in enumerate(scan) if _measure_on_closed_interval(f, float(p)) >= t]
    if not reached:
        return math.inf
    k = reached[0]
    if k == 0:
        return 0.0
    lo, hi = float(scan[k - 1]), float(scan[k])
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _measure_on_closed_interval(f, mid) >= t:
            hi = mid
        else:
            lo = mid
    return hi


def critical_probability(f: CubeFunction) -> float:
    return p_of(f, 0.5)


@dataclass(frozen=True, eq=False)
class ThresholdProfile:
    f: CubeFunction
    curve: tuple[tuple[float, float], ...]  # (p, mu_p(f))
    p_c: float
    monotone: bool

    def p_of(self, t: float) -> float:
        return p_of(self.f, t)

    def rows(self) -> list[dict]:
        return [{"p": p, "mu": mu, "influence": total_influence_at(self.f, p)} for p, mu in self.curve]


def default_grid() -> np.ndarray:
    start, stop, points = CURVE_GRID
    return np.linspace(start, stop, points)


def measure_curve(f: CubeFunction, p_grid=None) -> ThresholdProfile:
    """
    Exact mu_p(f) on a grid of p in (0, 1) with the critical probability p_c.

    A non-monotone f is flagged, and its p_c is the first crossing of 1/2.
    """
    if not f.is_boolean():
        raise ValueError("Measure curves are defined for boolean functions only.")
    grid = default_grid() if p_grid is None else np.asarray(p_grid, dtype=float).reshape(-1)
    curve = tuple((float(p), measure_at(f, float(p))) for p in grid)
    monotone = is_monotone(f)
    if not monotone:
        logger.warning("f is not monotone; p_c is reported as the first crossing of 1/2")
    else:
        ordered = sorted(curve)
        if any(b[1] < a[1] - 1e-12 for a, b in zip(ordered, ordered[1:], strict=False)):
            logger.warning("The measure curve of a monotone f decreases on the grid")
    logger.debug("Measure curve over %d grid points", len(curve))
    return ThresholdProfile(f, curve, critical_probability(f), monotone)


def russo_check(f: CubeFunction, p: float, h: float = RUSSO_STEP) -> float:
    """
    |(mu_{p+h} - mu_{p-h}) / 2h - I_p[f]|, the deviation from the Margulis-Russo formula.

    The formula holds for monotone f; other functions return their deviation unchecked.
    """
    if not f.is_boolean():
        raise ValueError("The Margulis-Russo check needs a boolean function.")
    if not 0.0 < p - h < p + h < 1.0:
        raise ValueError(f"p +- h must stay inside (0, 1), got p={p}, h={h}.")
    derivative = (measure_at(f, p + h) - measure_at(f, p - h)) / (2.0 * h)
    deviation = abs(derivative - total_influence_at(f, p))
    logger.debug("Margulis-Russo at p=%g, h=%g: deviation %.3e", p, h, deviation)
    return deviation


def threshold_width_ratio(f: CubeFunction, low: float = WIDTH_LEVELS[0], high: float = WIDTH_LEVELS[1]) -> float:
    """p(high) / p(low); raises when either level is never reached or reached at p = 0."""
    if not low < high:
        raise ValueError(f"Need low < high, got {low} and {high}.")
    p_low, p_high = p_of(f, low), p_of(f, high)
    if p_low <= 0.0 or math.isinf(p_high):
        raise ValueError(f"The width ratio is not finite for this function (p({low})={p_low}, p({high})={p_high}).")
    return p_high / p_low
