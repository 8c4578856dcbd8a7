"""
The noise operator T_rho on the p-biased cube.

A sample y ~ N_rho(x) keeps each coordinate of x with probability rho and otherwise
redraws it from the p-biased bit. T_rho f(x) = E[f(y)]; spectrally it scales fhat(S) by
rho^|S|. The spectral path is the default; the explicit transition kernel exists to verify it.
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from cube_core.bits import popcounts
from cube_core.cube_config import DEFAULT_TOLERANCE, KERNEL_N_CAP
from cube_core.generators import hamming_threshold
from cube_core.models import BiasedCube, BoundCheck, CubeFunction
from cube_core.transform import forward_transform, inner, inverse_transform, mu_measure
from cube_influence.globalness import GlobalnessReport, globalness

logger = logging.getLogger(__name__)

SPECTRAL = "spectral"
KERNEL = "kernel"


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"Noise correlation rho must lie in [0, 1], got {rho}.")


def noise_kernel(cube: BiasedCube, rho: float) -> np.ndarray:
    """
    The 2^n x 2^n matrix K with K[x, y] = Pr[N_rho(x) = y].

    Built as a Kronecker power of the one-coordinate kernel; the first factor is the highest bit.
    """
    _check_rho(rho)
    if cube.n > KERNEL_N_CAP:
        raise ValueError(f"Explicit kernels are limited to n <= {KERNEL_N_CAP}, got n={cube.n}.")
    resample = np.array([1.0 - cube.p, cube.p])
    single = rho * np.eye(2) + (1.0 - rho) * np.outer(np.ones(2), resample)
    return reduce(np.kron, [single] * cube.n, np.ones((1, 1)))


def apply_noise(f: CubeFunction, rho: float, method: str = SPECTRAL) -> CubeFunction:
    """T_rho f, either by the rho^|S| multiplier (default) or by the explicit kernel."""
    _check_rho(rho)
    if method == KERNEL:
        return f.with_values(noise_kernel(f.cube, rho) @ f.values)
    if method != SPECTRAL:
        raise ValueError(f"Unknown noise method {method!r}; use {SPECTRAL!r} or {KERNEL!r}.")
    F = forward_transform(f)
    return inverse_transform(F.with_coeffs(F.coeffs * rho ** popcounts(f.n)))


@dataclass(frozen=True)
class NoiseOperator:
    rho: float
    cube: BiasedCube

    def __post_init__(self):
        _check_rho(self.rho)

    def __call__(self, f: CubeFunction) -> CubeFunction:
        if f.cube != self.cube:
            raise ValueError(f"Operator acts on {self.cube}, got a function on {f.cube}.")
        return apply_noise(f, self.rho)

    def then(self, other: "NoiseOperator") -> "NoiseOperator":
        """Composition; the noise operators form a semigroup T_a T_b = T_ab."""
        return NoiseOperator(self.rho * other.rho, self.cube)


def noise_stability(f: CubeFunction, rho: float, method: str = SPECTRAL) -> float:
    """Stab_rho(f) = <f, T_rho f> = sum_S rho^|S| fhat(S)^2."""
    _check_rho(rho)
    if method == SPECTRAL:
        F = forward_transform(f)
        return float(np.dot(rho ** popcounts(f.n), np.square(F.coeffs)))
    return inner(f, apply_noise(f, rho, method=method))


@dataclass(frozen=True)
class NoiseSensitivityReport:
    rho: float
    eps: float
    r: float  # log(2/eps) / log(1/rho)
    delta: float  # 10^{-3r-1} eps^3
    measure: float
    stability: float
    hypothesis_met: bool
    globalness: GlobalnessReport
    conclusion: BoundCheck  # Stab_rho(f) <= eps mu_p(f)


def noise_sensitivity_check(
    f: CubeFunction, rho: float, eps: float, tolerance: float = DEFAULT_TOLERANCE
) -> NoiseSensitivityReport:
    """
    Sparse global functions are noise sensitive: with r and delta derived from rho and eps,
    an (r, delta)-global boolean f with mu_p(f) < delta has Stab_rho(f) <= eps mu_p(f).

    Globalness quantifies over |J| <= floor(r). The conclusion is evaluated in every case; the
    report says whether the hypotheses hold.
    """
    if not f.is_boolean():
        raise ValueError("The noise sensitivity check needs a boolean function.")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}.")
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}.")
    r = math.log(2.0 / eps) / math.log(1.0 / rho)
    delta = 10.0 ** (-3.0 * r - 1.0) * eps**3
    measure = mu_measure(f)
    report = globalness(f, max(0, math.floor(r)), delta)
    stability = noise_stability(f, rho)
    hypothesis = report.is_global and measure < delta
    conclusion = BoundCheck(stability, eps * measure, tolerance)
    logger.info(
        "Noise sensitivity rho=%g eps=%g: r=%.3f delta=%.3e hypothesis=%s conclusion margin=%.3e",
        rho,
        eps,
        r,
        delta,
        hypothesis,
        conclusion.margin,
    )
    return NoiseSensitivityReport(rho, eps, r, delta, measure, stability, hypothesis, report, conclusion)


@dataclass(frozen=True)
class HammingComparison:
    rho: float
    correlation: float  # <T_rho f, g>
    ball_correlation: float  # <T_rho H_a, H_b> with a = mu(f), b = mu(g)
    thresholds: tuple[int, int]

    @property
    def gap(self) -> float:
        return self.ball_correlation - self.correlation


def hamming_ball_comparison(f: CubeFunction, g: CubeFunction, rho: float) -> HammingComparison:
    """
    Compares the noisy correlation of two boolean functions with that of the Hamming balls
    of (nearly) the same measures. Reported only; no inequality is asserted.
    """
    if f.cube != g.cube:
        raise ValueError("Both functions must live on the same cube.")
    if not (f.is_boolean() and g.is_boolean()):
        raise ValueError("The Hamming ball comparison needs boolean functions.")
    sizes = popcounts(f.n)
    t_f = hamming_threshold(f.cube, mu_measure(f))
    t_g = hamming_threshold(f.cube, mu_measure(g))
    ball_f = f.with_values((sizes >= t_f).astype(float))
    ball_g = f.with_values((sizes >= t_g).astype(float))
    correlation = inner(apply_noise(f, rho), g)
    ball_correlation = inner(apply_noise(ball_f, rho), ball_g)
    return HammingComparison(rho, correlation, ball_correlation, (t_f, t_g))


def noise_curve(f: CubeFunction, rhos: list[float]) -> list[dict]:
    """Rows (rho, Stab_rho) in the order given, ready for plotting."""
    weights = np.square(forward_transform(f).coeffs)
    sizes = popcounts(f.n)
    rows = []
    for rho in rhos:
        _check_rho(rho)
        rows.append({"rho": rho, "stability": float(np.dot(rho**sizes, weights))})
    return rows
