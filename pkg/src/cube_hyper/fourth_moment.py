"""
Fourth-moment hypercontractivity on the p-biased cube.

All quantities go through W_S = ||D_S f||_2^2 = sum over E containing S of fhat(E)^2, so every
bound below costs one transform and one superset zeta pass.
"""

import logging
from dataclasses import dataclass

import numpy as np

from cube_core.bits import popcounts
from cube_core.cube_config import DEFAULT_TOLERANCE
from cube_core.models import BoundCheck, CubeFunction
from cube_core.transform import forward_transform, lr_norm
from cube_influence.influences import derivative_norms
from cube_noise.operators import apply_noise

from .hybrids import lambda_of
from .hyper_config import HYPREF_RHO_MAX, LAMBDA_FORM_RHO, SMALL_INFLUENCE_RHO

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FourthMomentBound:
    """lhs = ||T_rho f||_4^4 <= middle = sum (3 lambda rho^4)^|S| W_S^2 <= rhs = sum (3 sigma^2 rho^4)^|S| I_S^2."""

    rho: float
    lhs: float
    middle: float
    rhs: float
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def lower(self) -> BoundCheck:
        return BoundCheck(self.lhs, self.middle, self.tolerance)

    @property
    def upper(self) -> BoundCheck:
        return BoundCheck(self.middle, self.rhs, self.tolerance)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lower.passed and self.upper.passed


def hypref_bound_check(f: CubeFunction, rho: float, tolerance: float = DEFAULT_TOLERANCE) -> FourthMomentBound:
    """Checks ||T_rho f||_4^4 against both derivative sums; rho may not exceed 1/sqrt(12)."""
    if not 0.0 <= rho <= HYPREF_RHO_MAX:
        raise ValueError(f"rho must lie in [0, 1/sqrt(12)] ~ [0, {HYPREF_RHO_MAX:.6f}], got {rho}.")
    sizes = popcounts(f.n)
    W = derivative_norms(forward_transform(f))
    lhs = lr_norm(apply_noise(f, rho), 4) ** 4
    middle = float(np.dot((3.0 * lambda_of(f.cube.p) * rho**4) ** sizes, np.square(W)))
    # (3 sigma^2 rho^4)^|S| I_S^2 with I_S = W_S / sigma^{2|S|}
    rhs = float(np.dot((3.0 * rho**4 / f.cube.sigma**2) ** sizes, np.square(W)))
    report = FourthMomentBound(rho, lhs, middle, rhs, tolerance)
    if not report.passed:
        logger.warning("Derivative-sum bound fails at rho=%g: %g <= %g <= %g", rho, lhs, middle, rhs)
    return report


def _energy(f: CubeFunction) -> float:
    energy = lr_norm(f, 2) ** 2
    if energy <= 0.0:
        raise ValueError("The bound needs E[f^2] > 0; the zero function has no beta.")
    return energy


@dataclass(frozen=True)
class SmallInfluenceReport:
    beta: float  # max_S I_S(f) / E[f^2]
    beta_lambda: float  # max_S W_S lambda^|S| / E[f^2]
    influence_form: BoundCheck  # ||T_{1/5} f||_4 <= beta^{1/4} ||f||_2
    lambda_form: BoundCheck  # ||T_{1/sqrt 24} f||_4 <= beta_lambda^{1/4} ||f||_2

    @property
    def passed(self) -> bool:
        return self.influence_form.passed and self.lambda_form.passed


def thm13_check(f: CubeFunction, tolerance: float = DEFAULT_TOLERANCE) -> SmallInfluenceReport:
    """
    Hypercontractivity for functions with small generalised influences, in both forms.

    beta is the exact maximum over every subset; influences above the degree vanish, so this is
    also the maximum over |S| <= deg f. Both betas are reported so the gap between the
    sigma-scaled and the lambda-scaled hypotheses is visible.
    """
    energy = _energy(f)
    sizes = popcounts(f.n)
    W = derivative_norms(forward_transform(f))
    beta = float(np.max(W / f.cube.sigma ** (2 * sizes)) / energy)
    beta_lambda = float(np.max(W * lambda_of(f.cube.p) ** sizes) / energy)
    norm2 = energy**0.5
    influence_form = BoundCheck(
        lr_norm(apply_noise(f, SMALL_INFLUENCE_RHO), 4), beta**0.25 * norm2, tolerance
    )
    lambda_form = BoundCheck(lr_norm(apply_noise(f, LAMBDA_FORM_RHO), 4), beta_lambda**0.25 * norm2, tolerance)
    logger.info(
        "Small-influence hypercontractivity: beta=%.6g (margin %.3e), beta_lambda=%.6g (margin %.3e)",
        beta,
        influence_form.margin,
        beta_lambda,
        lambda_form.margin,
    )
    return SmallInfluenceReport(beta, beta_lambda, influence_form, lambda_form)


def _degree_and_delta(f: CubeFunction, r: int | None, delta: float | None) -> tuple[int, float]:
    F = forward_transform(f)
    degree = F.degree()
    if r is None:
        r = degree
    elif degree > r:
        raise ValueError(f"f has degree {degree}, above the stated bound r={r}.")
    sizes = popcounts(f.n)
    witnessed = float(np.max((derivative_norms(F) / f.cube.sigma ** (2 * sizes))[sizes <= r]))
    if delta is None:
        delta = witnessed
    elif delta < witnessed * (1.0 - 1e-12):
        raise ValueError(f"delta={delta} is below the largest influence {witnessed} over |S| <= {r}.")
    return r, float(delta)


def practice_bound_check(
    f: CubeFunction, delta: float | None = None, r: int | None = None, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """
    ||f||_4 <= 5^{3r/4} delta^{1/4} ||f||_2^{1/2} for f of degree at most r whose influences
    I_S(f), |S| <= r (the empty set included), are at most delta.

    r defaults to the degree of f and delta to the largest witnessed influence.
    """
    r, delta = _degree_and_delta(f, r, delta)
    rhs = 5.0 ** (0.75 * r) * delta**0.25 * lr_norm(f, 2) ** 0.5
    return BoundCheck(lr_norm(f, 4), rhs, tolerance)


def degree_r_uniform_check(g: CubeFunction, tolerance: float = DEFAULT_TOLERANCE) -> BoundCheck:
    """||g||_4 <= sqrt(3)^r ||g||_2 on the uniform cube, r = deg g."""
    if g.cube.p != 0.5:
        raise ValueError(f"The degree-r moment bound is stated for the uniform cube, got p={g.cube.p}.")
    r = forward_transform(g).degree()
    return BoundCheck(lr_norm(g, 4), 3.0 ** (r / 2.0) * lr_norm(g, 2), tolerance)
