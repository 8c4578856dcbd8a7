"""
Hybrid interpolants for the replacement method.

For 0 <= t <= n the hybrid f_t keeps the Fourier coefficients of f but reads coordinates
0..t-1 with uniform characters and coordinates t..n-1 with p-biased characters. It lives on
the mixed product measure mu_{1/2}^t x mu_p^{n-t}. f_0 is f itself and f_n carries the same
coefficients on the uniform cube. The mixed noise operator T^t_{a,b} scales the coefficient of
S by a^{|S & [t]|} b^{|S - [t]|}.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cube_core.bits import popcounts
from cube_core.cube_config import DEFAULT_TOLERANCE, KERNEL_N_CAP
from cube_core.models import BoundCheck, SpectralForm
from cube_core.transform import inverse_butterflies, product_weights

from .hyper_config import UNIFORM_BIAS, UNIFORM_NOISE_FACTOR

logger = logging.getLogger(__name__)


def lambda_of(p: float) -> float:
    """lambda = E[chi^4] = ((1 - p)^3 + p^3) / (p (1 - p)); it never exceeds 1 / sigma^2."""
    if not 0.0 < p <= 0.5:
        raise ValueError(f"lambda is defined for p in (0, 1/2], got {p}.")
    return ((1.0 - p) ** 3 + p**3) / (p * (1.0 - p))


def hybrid_biases(n: int, t: int, p: float) -> list[float]:
    if not 0 <= t <= n:
        raise ValueError(f"Hybrid index t must lie in 0..{n}, got {t}.")
    return [UNIFORM_BIAS] * t + [p] * (n - t)


@dataclass(frozen=True, eq=False)
class HybridFunction:
    t: int
    coeffs: SpectralForm

    def __post_init__(self):
        hybrid_biases(self.coeffs.n, self.t, self.coeffs.cube.p)

    @property
    def n(self) -> int:
        return self.coeffs.n

    @property
    def biases(self) -> list[float]:
        return hybrid_biases(self.n, self.t, self.coeffs.cube.p)

    @cached_property
    def values(self) -> np.ndarray:
        return inverse_butterflies(self.coeffs.coeffs, self.biases)

    @cached_property
    def weights(self) -> np.ndarray:
        return product_weights(self.biases)

    def moment(self, q: float) -> float:
        """E|f_t|^q under the mixed measure."""
        return float(np.dot(np.abs(self.values) ** q, self.weights))

    def norm(self, q: float) -> float:
        return self.moment(q) ** (1.0 / q)


def mixed_multiplier(n: int, t: int, rho_u: float, rho_p: float) -> np.ndarray:
    """Entry S is rho_u^{|S & [t]|} rho_p^{|S - [t]|}."""
    for rho in (rho_u, rho_p):
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"Noise rates must lie in [0, 1], got {rho}.")
    idx = np.arange(1 << n, dtype=np.int64)
    low = (1 << t) - 1
    sizes = popcounts(n)
    return rho_u ** sizes[idx & low] * rho_p ** sizes[idx & ~low]


def hybrid_eval(F: SpectralForm, t: int) -> HybridFunction:
    return HybridFunction(t, F)


def mixed_noise(F: SpectralForm, t: int, rho_u: float, rho_p: float) -> HybridFunction:
    """T^t_{rho_u, rho_p} f_t: noise rho_u on the uniform coordinates, rho_p on the biased ones."""
    hybrid_biases(F.n, t, F.cube.p)
    return HybridFunction(t, F.with_coeffs(F.coeffs * mixed_multiplier(F.n, t, rho_u, rho_p)))


def derivative_coeffs(F: SpectralForm, mask: int) -> SpectralForm:
    """Coefficients of D_S f: the coefficient of T - S is fhat(T) for every T containing S."""
    idx = np.arange(F.cube.size, dtype=np.int64)
    above = idx[(idx & mask) == mask]
    out = np.zeros(F.cube.size)
    out[above & ~mask] = F.coeffs[above]
    return F.with_coeffs(out)


def _check_replacement_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0 / UNIFORM_NOISE_FACTOR:
        raise ValueError(f"The replacement method needs rho in [0, 1/2] so that 2 rho is a noise rate, got {rho}.")


def replacement_step_sides(
    F: SpectralForm, t: int, rho: float, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """
    Both sides of one replacement step, for 1 <= t <= n:

        E[(T^{t-1} f_{t-1})^4] <= E[(T^t f_t)^4] + 3 lambda rho^4 E[(T^t (D_t f)_t)^4]

    with T^s = T^s_{2 rho, rho}. Coordinate t is bit t - 1.
    """
    if not 1 <= t <= F.n:
        raise ValueError(f"The replacement step needs 1 <= t <= {F.n}, got {t}.")
    _check_replacement_rho(rho)
    rho_u = UNIFORM_NOISE_FACTOR * rho
    lam = lambda_of(F.cube.p)
    before = mixed_noise(F, t - 1, rho_u, rho).moment(4)
    after = mixed_noise(F, t, rho_u, rho).moment(4)
    replaced = mixed_noise(derivative_coeffs(F, 1 << (t - 1)), t, rho_u, rho).moment(4)
    return BoundCheck(before, after + 3.0 * lam * rho**4 * replaced, tolerance)


def replacement_step_check(F: SpectralForm, t: int, rho: float) -> float:
    """Slack (right side minus left side) of the replacement step at t."""
    return replacement_step_sides(F, t, rho).margin


def replacement_chain_check(
    F: SpectralForm, rho: float, i: int = 0, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """
    The replacement steps chained from t = n down to i + 1:

        ||T^i f_i||_4^4 <= sum over S avoiding [i] of (3 lambda rho^4)^|S| ||T_{2 rho} (D_S f)_n||_4^4

    where the right-hand norms are on the uniform cube. At i = 0 the left side is ||T_rho f||_4^4 on mu_p.
    """
    _check_replacement_rho(rho)
    n = F.n
    if n > KERNEL_N_CAP:
        raise ValueError(f"The chained bound enumerates 4^n terms; n is limited to {KERNEL_N_CAP}, got {n}.")
    if not 0 <= i <= n:
        raise ValueError(f"i must lie in 0..{n}, got {i}.")
    rho_u = UNIFORM_NOISE_FACTOR * rho
    factor = 3.0 * lambda_of(F.cube.p) * rho**4
    lhs = mixed_noise(F, i, rho_u, rho).moment(4)
    low = (1 << i) - 1
    rhs = 0.0
    for mask in range(1 << n):
        if mask & low:
            continue
        D = derivative_coeffs(F, mask)
        if not np.any(D.coeffs):
            continue
        rhs += factor ** int(mask).bit_count() * mixed_noise(D, n, rho_u, rho).moment(4)
    logger.debug("Replacement chain n=%d i=%d: lhs=%.6g rhs=%.6g", n, i, lhs, rhs)
    return BoundCheck(lhs, rhs, tolerance)


def hybrid_norm_drift(F: SpectralForm) -> float:
    """Largest deviation of ||f_t||_2 from ||f||_2 over every t; zero up to roundoff."""
    base = math.sqrt(float(np.sum(np.square(F.coeffs))))
    return max(abs(hybrid_eval(F, t).norm(2) - base) for t in range(F.n + 1))
