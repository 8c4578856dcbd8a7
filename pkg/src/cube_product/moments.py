"""
q-th moments on general product spaces.

Here sigma_t = sqrt(p_t (1 - p_t)) is taken with the smallest atom p_t of factor t, and
sigma_S is the product over S.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from cube_core.bits import members, subset_products
from cube_core.cube_config import DEFAULT_TOLERANCE
from cube_core.models import BoundCheck
from cube_hyper.qnorm import check_even_q

from .decomposition import es_decompose, product_noise
from .product_config import DEPENDENCE_ATOL, ES_RHO_DENOMINATOR
from .spaces import ProductFunction

logger = logging.getLogger(__name__)


def es_rho_max(q: int) -> float:
    return 1.0 / (ES_RHO_DENOMINATOR * q**1.5)


def es_hyper_check(f: ProductFunction, q: int, rho: float, tolerance: float = DEFAULT_TOLERANCE) -> BoundCheck:
    """||T_rho f||_q^q <= sum_S sigma_S^{2-q} ||L_S f||_2^q for even q and rho <= 1/(8 q^{1.5})."""
    q = check_even_q(q)
    if not 0.0 <= rho <= es_rho_max(q) * (1.0 + 1e-12):
        raise ValueError(f"rho must lie in [0, 1/(8 q^1.5)] = [0, {es_rho_max(q):.6g}] for q={q}, got {rho}.")
    decomposition = es_decompose(f)
    lhs = product_noise(f, rho).moment(q)
    envelope = subset_products([s ** (2 - q) for s in f.space.sigmas])
    rhs = float(np.dot(envelope, decomposition.laplacian_energies ** (q / 2.0)))
    check = BoundCheck(lhs, rhs, tolerance)
    logger.info("Product-space bound q=%d rho=%g: %.6g <= %.6g (margin %.3e)", q, rho, lhs, rhs, check.margin)
    if not check.passed:
        logger.warning("Product-space hypercontractive bound fails at q=%d, rho=%g", q, rho)
    return check


@dataclass(frozen=True)
class HolderTermReport:
    coverage: tuple[int, ...]  # how many of the sets contain each coordinate
    expectation: float  # E[prod f_i]
    bound: BoundCheck  # |E prod f_i| <= prod ||f_i||_2 prod_{j>=3} sigma_{T_j}^{2-j}
    zero: BoundCheck | None  # |E prod g^{=S_i}| <= 0, asserted for components under single coverage

    @property
    def single_covered(self) -> bool:
        return 1 in self.coverage

    @property
    def passed(self) -> bool:
        return self.bound.passed and (self.zero is None or self.zero.passed)


def _coverage(n: int, sets: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(mask >> t & 1 for mask in sets) for t in range(n))


def _holder_term(
    functions: Sequence[ProductFunction], sets: Sequence[int], tolerance: float, zero_case: bool
) -> HolderTermReport:
    space = functions[0].space
    coverage = _coverage(space.n, sets)
    product = np.prod([g.values for g in functions], axis=0)
    expectation = float(np.dot(product, space.weights))
    factor = math.prod(s ** (2 - j) for s, j in zip(space.sigmas, coverage, strict=True) if j >= 3)
    rhs = math.prod(g.norm(2) for g in functions) * factor
    bound = BoundCheck(abs(expectation), rhs, tolerance)
    zero = BoundCheck(abs(expectation), 0.0, tolerance) if zero_case and 1 in coverage else None
    report = HolderTermReport(coverage, expectation, bound, zero)
    logger.debug("Holder term over coverage %s: |E| = %.6g <= %.6g", coverage, abs(expectation), rhs)
    if not report.passed:
        logger.warning("Holder term bound fails for coverage %s", coverage)
    return report


def holder_term_check(
    functions: Sequence[ProductFunction], sets: Sequence[int], tolerance: float = DEFAULT_TOLERANCE
) -> HolderTermReport:
    """
    |E[prod f_i]| <= prod ||f_i||_2 * prod_{j=3..q} sigma_{T_j}^{2-j}, with T_j the coordinates
    covered by exactly j of the sets. Every f_i must depend only on the coordinates of S_i.
    """
    if len(functions) != len(sets) or not functions:
        raise ValueError(f"Need one set per function, got {len(functions)} functions and {len(sets)} sets.")
    space = functions[0].space
    for i, (g, mask) in enumerate(zip(functions, sets, strict=True)):
        if g.space != space:
            raise ValueError("All functions must live on the same product space.")
        if not 0 <= mask < 1 << space.n:
            raise ValueError(f"Set {i} ({mask}) is outside a space of {space.n} factors.")
        scale = max(1.0, float(np.max(np.abs(g.values))))
        if g.dependence_gap(mask) > DEPENDENCE_ATOL * scale:
            raise ValueError(f"Function {i} depends on coordinates outside {members(mask)}.")
    return _holder_term(functions, sets, tolerance, zero_case=False)


def es_product_term_check(
    g: ProductFunction, sets: Sequence[int], tolerance: float = DEFAULT_TOLERANCE
) -> HolderTermReport:
    """The Holder term bound for the components g^{=S_i}; single coverage forces the term to vanish."""
    if not sets:
        raise ValueError("Need at least one set.")
    decomposition = es_decompose(g)
    for mask in sets:
        if not 0 <= mask < 1 << g.space.n:
            raise ValueError(f"Set {mask} is outside a space of {g.space.n} factors.")
    components = [decomposition.component(mask) for mask in sets]
    return _holder_term(components, sets, tolerance, zero_case=True)


def single_factor_moment_check(f: ProductFunction, q: float, tolerance: float = DEFAULT_TOLERANCE) -> BoundCheck:
    """||f||_q^q <= ||f||_2^q sigma^{2-q} on one factor whose atoms all weigh at least p."""
    if f.space.n != 1:
        raise ValueError(f"The moment bound is for a single factor, got {f.space.n} factors.")
    if not q >= 2:
        raise ValueError(f"q must be at least 2, got {q}.")
    sigma = f.space.sigmas[0]
    return BoundCheck(f.moment(q), f.norm(2) ** q * sigma ** (2 - q), tolerance)
