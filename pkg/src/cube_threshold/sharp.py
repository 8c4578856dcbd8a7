"""
Sharp thresholds for global monotone functions, by the two routes.

The traditional route integrates the Margulis-Russo formula under M-globalness across an
interval. The noise route needs globalness only at p: with rho = p(1-q)/(q(1-p)) the
directed operator gives mu_q(f) >= mu_p(f)^2 / Stab_rho(f) for monotone f.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from cube_core.bits import lowest_argmax, masks_up_to
from cube_core.cube_config import DEFAULT_TOLERANCE
from cube_core.models import BiasedCube, BoundCheck, CubeFunction
from cube_core.transform import inner, is_monotone, restricted_measures
from cube_influence.globalness import MEASURE_ATOL, globalness
from cube_noise.directed import DirectedOperator, directed_apply
from cube_noise.operators import noise_stability

from .curves import critical_probability, measure_at
from .threshold_config import (
    BISECTION_MAX_ITER,
    BISECTION_TOL,
    M_GLOBAL_EXPONENT,
    M_GLOBAL_GRID_SIZE,
    NOISE_ROUTE_EPS,
    NOISE_ROUTE_MAX_DOUBLINGS,
    NOISE_ROUTE_TRIAL_C,
    TRAD_TRIAL_C,
)

logger = logging.getLogger(__name__)


def _on_bias(f: CubeFunction, p: float) -> CubeFunction:
    return CubeFunction(BiasedCube(f.n, p, allow_upper=True), f.values)


def _check_pair(p: float, q: float) -> None:
    if not 0.0 < p < q < 1.0:
        raise ValueError(f"Need 0 < p < q < 1, got p={p}, q={q}.")


@dataclass(frozen=True)
class MGlobalCertificate:
    """Grid certificate for mu_p(f_{J->1}) <= mu_p(f)^{0.01} over |J| <= M and the probed p."""

    M: int
    interval: tuple[float, float]
    grid: tuple[float, ...]
    passed: bool
    worst_p: float
    worst_set: int
    worst_excess: float  # largest mu_p(f_{J->1}) - mu_p(f)^{0.01}; 0 <= 0 counts as a pass


def m_global_certify(
    f: CubeFunction, M: int, interval: tuple[float, float], grid_size: int = M_GLOBAL_GRID_SIZE
) -> MGlobalCertificate:
    """Checks M-globalness exhaustively over |J| <= M at log-spaced points of the interval."""
    if not f.is_boolean():
        raise ValueError("M-globalness is defined for boolean functions only.")
    if M < 0 or int(M) != M:
        raise ValueError(f"The restriction budget M must be a non-negative integer, got {M}.")
    lo, hi = interval
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError(f"The interval must satisfy 0 < lo <= hi < 1, got {interval}.")
    if grid_size < 1:
        raise ValueError(f"grid_size must be at least 1, got {grid_size}.")
    grid = np.geomspace(lo, hi, grid_size) if lo < hi else np.array([lo])
    candidates = masks_up_to(f.n, min(int(M), f.n))
    worst_p, worst_set, worst_excess = float(grid[0]), 0, -math.inf
    for p in grid:
        restricted = restricted_measures(_on_bias(f, float(p)))
        excess = restricted - max(float(restricted[0]), 0.0) ** M_GLOBAL_EXPONENT
        J = lowest_argmax(excess, candidates)
        if excess[J] > worst_excess:
            worst_p, worst_set, worst_excess = float(p), J, float(excess[J])
    passed = worst_excess <= MEASURE_ATOL
    logger.info(
        "M-global certificate M=%d on [%g, %g] over %d points: %s (worst excess %.3e at p=%g)",
        M,
        lo,
        hi,
        grid.size,
        "pass" if passed else "fail",
        worst_excess,
        worst_p,
    )
    probes = tuple(float(p) for p in grid)
    return MGlobalCertificate(int(M), (lo, hi), probes, passed, worst_p, worst_set, worst_excess)


def trad_min_constant(measure_p: float, measure_q: float, p: float, q: float) -> float:
    """Smallest C with mu_q >= mu_p^{(p/q)^{1/C}}: ln(p/q) / ln(ln mu_q / ln mu_p)."""
    if measure_p <= 0.0 or measure_q >= 1.0 - MEASURE_ATOL:
        return 0.0
    if measure_p >= 1.0 - MEASURE_ATOL or measure_q <= 0.0:
        return math.inf
    ratio = math.log(measure_q) / math.log(measure_p)
    if ratio >= 1.0:
        return math.inf
    return math.log(p / q) / math.log(ratio)


@dataclass(frozen=True)
class SharpThresholdReport:
    p: float
    q: float
    M: int
    C_trial: float
    p_c: float
    measure_p: float
    measure_q: float
    monotone: bool
    below_critical: bool  # q <= p_c
    dense_enough: bool  # mu_p(f) >= e^{-M/C}
    certificate: MGlobalCertificate
    conclusion: BoundCheck  # mu_p^{(p/q)^{1/C}} <= mu_q
    min_constant: float

    @property
    def hypothesis_met(self) -> bool:
        return self.monotone and self.below_critical and self.dense_enough and self.certificate.passed

    @property
    def corollary_ratio(self) -> float:
        """q / p, which the theorem bounds by M^C."""
        return self.q / self.p

    @property
    def passed(self) -> bool:
        return not self.hypothesis_met or self.conclusion.passed


def sharp_threshold_check(
    f: CubeFunction,
    p: float,
    q: float,
    M: int,
    C_trial: float = TRAD_TRIAL_C,
    grid_size: int = M_GLOBAL_GRID_SIZE,
    tolerance: float = DEFAULT_TOLERANCE,
) -> SharpThresholdReport:
    """
    mu_q(f) >= mu_p(f)^{(p/q)^{1/C}} for monotone f that is M-global on [p, q] with q <= p_c and
    mu_p(f) >= e^{-M/C}. Unmet hypotheses are reported and the conclusion is not asserted.
    """
    _check_pair(p, q)
    if not C_trial > 0:
        raise ValueError(f"The trial constant must be positive, got {C_trial}.")
    certificate = m_global_certify(f, M, (p, q), grid_size)
    measure_p, measure_q = measure_at(f, p), measure_at(f, q)
    p_c = critical_probability(f)
    rhs = measure_p ** ((p / q) ** (1.0 / C_trial))
    report = SharpThresholdReport(
        p,
        q,
        int(M),
        C_trial,
        p_c,
        measure_p,
        measure_q,
        is_monotone(f),
        q <= p_c,
        measure_p >= math.exp(-M / C_trial),
        certificate,
        BoundCheck(rhs, measure_q, tolerance),
        trad_min_constant(measure_p, measure_q, p, q),
    )
    logger.info(
        "Sharp threshold on [%g, %g]: hypothesis %s, mu_q=%.6g vs %.6g, min C %.4g",
        p,
        q,
        "met" if report.hypothesis_met else "unmet",
        measure_q,
        rhs,
        report.min_constant,
    )
    if not report.passed:
        logger.warning("Sharp threshold conclusion fails at C=%g on [%g, %g]", C_trial, p, q)
    return report


@dataclass(frozen=True)
class NoiseRouteReport:
    p: float
    q: float
    rho: float
    eps: float
    zeta: float  # q = (1 + zeta) p
    measure_p: float
    measure_q: float
    stability: float  # Stab_rho(f) under mu_p
    directed_correlation: float  # <f, T^{p->q} f> under mu_q; equals mu_p(f) for monotone f
    monotone: bool
    proposition: BoundCheck  # mu_p^2 / Stab_rho <= mu_q
    C_trial: float
    C_floor: float | None  # the caller's value of the theorem's constant C_0(zeta); None when unknown
    r: float  # C log(1/eps)
    delta: float  # C^{-r}
    checkable_hypothesis: bool  # everything but C >= C_0(zeta)
    theorem: BoundCheck  # mu_p / eps <= mu_q
    min_constant: float  # smallest C > 1 from which the instance never contradicts the theorem

    @property
    def theorem_hypothesis(self) -> bool:
        return self.checkable_hypothesis and self.C_floor is not None and self.C_trial >= self.C_floor

    @property
    def passed(self) -> bool:
        proposition = not self.monotone or self.proposition.passed
        return proposition and (not self.theorem_hypothesis or self.theorem.passed)


def _global_at(on_p: CubeFunction, measure_p: float, eps: float, C: float) -> tuple[float, float, bool]:
    """r, delta and whether mu_p(f) <= delta with f (r, delta)-global, for the constant C."""
    r = C * math.log(1.0 / eps)
    delta = C**-r
    return r, delta, measure_p <= delta and globalness(on_p, math.floor(r), delta).is_global


def _noise_route_min_constant(on_p: CubeFunction, measure_p: float, eps: float) -> float:
    """
    The boundary C* past which the C-dependent hypotheses fail.

    Both r and delta move against f as C grows, so the hypotheses hold on (1, C*] and the
    instance is consistent with the theorem exactly for C > C*.
    """
    lo, hi = 1.0, 2.0
    for _ in range(NOISE_ROUTE_MAX_DOUBLINGS):
        if not _global_at(on_p, measure_p, eps, hi)[2]:
            break
        lo, hi = hi, 2.0 * hi
    else:
        return math.inf
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if _global_at(on_p, measure_p, eps, mid)[2]:
            lo = mid
        else:
            hi = mid
    return hi


def noise_route_check(
    f: CubeFunction,
    p: float,
    q: float,
    eps: float = NOISE_ROUTE_EPS,
    C_trial: float = NOISE_ROUTE_TRIAL_C,
    tolerance: float = DEFAULT_TOLERANCE,
    C_floor: float | None = None,
) -> NoiseRouteReport:
    """
    The noise-sensitivity route to a sharp threshold on [p, q].

    mu_q(f) >= mu_p(f)^2 / Stab_rho(f) is asserted for every monotone f. The conclusion
    mu_q(f) >= mu_p(f) / eps holds for C >= C_0(zeta) when f is monotone, (r, delta)-global at p
    with r = C log(1/eps) and delta = C^{-r}, and mu_p(f) <= delta, with p, q, eps below 1/2.
    C_0(zeta) has no closed form, so the conclusion is asserted only when the caller supplies
    C_floor and C_trial >= C_floor. ``min_constant`` is the smallest C the instance allows.
    """
    if not f.is_boolean():
        raise ValueError("The noise route needs a boolean function.")
    _check_pair(p, q)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}.")
    if not C_trial > 1.0:
        raise ValueError(f"The trial constant must exceed 1, got {C_trial}.")
    if C_floor is not None and not C_floor > 1.0:
        raise ValueError(f"C_floor must exceed 1, got {C_floor}.")
    op = DirectedOperator(p, q)
    on_p, on_q = _on_bias(f, p), _on_bias(f, q)
    measure_p, measure_q = measure_at(f, p), measure_at(f, q)
    stability = noise_stability(on_p, op.rho)
    monotone = is_monotone(f)
    proposition = BoundCheck(measure_p**2 / stability if stability > 0.0 else 0.0, measure_q, tolerance)

    applies = monotone and max(p, q, eps) < 0.5
    r, delta, global_enough = _global_at(on_p, measure_p, eps, C_trial)
    theorem = BoundCheck(measure_p / eps, measure_q, tolerance)
    min_constant = 1.0 if theorem.passed or not applies else _noise_route_min_constant(on_p, measure_p, eps)
    report = NoiseRouteReport(
        p,
        q,
        op.rho,
        eps,
        q / p - 1.0,
        measure_p,
        measure_q,
        stability,
        inner(on_q, directed_apply(on_p, op)),
        monotone,
        proposition,
        C_trial,
        C_floor,
        r,
        delta,
        applies and global_enough,
        theorem,
        min_constant,
    )
    logger.info(
        "Noise route on [%g, %g]: rho=%.6g, proposition margin %.3e, theorem hypothesis %s, min C %.4g",
        p,
        q,
        op.rho,
        proposition.margin,
        "met" if report.theorem_hypothesis else "unmet",
        min_constant,
    )
    if not report.passed:
        logger.warning("Noise route bound fails on [%g, %g]", p, q)
    return report
