"""
Low-degree concentration of boolean and {-1, 0, 1}-valued functions.

Every check compares the exact low-degree mass ||f^{<=r}||_2^2 with the bound of the
matching theorem. Hypotheses are decided exactly and reported next to the comparison; a
report whose hypotheses fail makes no assertion.
"""

import logging
from dataclasses import dataclass

import numpy as np

from cube_core.bits import popcounts
from cube_core.cube_config import DEFAULT_TOLERANCE
from cube_core.models import BoundCheck, CubeFunction, SpectralForm
from cube_core.transform import forward_transform, inverse_transform, lr_norm, mu_measure
from cube_influence.globalness import MEASURE_ATOL, globalness
from cube_influence.influences import influence_spectrum, total_influence

from .stability_config import GLOBAL_FORM_BASE, INFLUENCE_FORM_BASE, WARMUP_BASE

logger = logging.getLogger(__name__)


def truncate(F: SpectralForm, r: float) -> SpectralForm:
    """f^{<=r}: zeroes every coefficient with |S| > r."""
    if r < 0:
        raise ValueError(f"Truncation degree must be non-negative, got {r}.")
    return F.with_coeffs(np.where(popcounts(F.n) <= r, F.coeffs, 0.0))


def low_degree_mass(F: SpectralForm, r: float) -> float:
    return float(np.sum(np.square(truncate(F, r).coeffs)))


@dataclass(frozen=True)
class WarmupReport:
    r: float
    measure: float
    low_mass: float
    holder: BoundCheck  # ||g||_2^2 <= ||g||_4 ||f||_2^{1.5}, g = f^{<=r}
    bound: BoundCheck  # ||f^{<=r}||_2^2 <= 3^r mu^{1.5}

    @property
    def margin(self) -> float:
        return self.bound.margin

    @property
    def passed(self) -> bool:
        return self.holder.passed and self.bound.passed


def warmup_check(f: CubeFunction, r: float, tolerance: float = DEFAULT_TOLERANCE) -> WarmupReport:
    """||f^{<=r}||_2^2 <= 3^r mu_{1/2}(f)^{1.5} for boolean f on the uniform cube."""
    if f.cube.p != 0.5:
        raise ValueError(f"The warm-up bound is stated for the uniform cube, got p={f.cube.p}.")
    if not f.is_boolean():
        raise ValueError("The warm-up bound is defined for boolean functions only.")
    F = truncate(forward_transform(f), r)
    low = float(np.sum(np.square(F.coeffs)))
    measure = mu_measure(f)
    holder = BoundCheck(low, lr_norm(inverse_transform(F), 4) * measure**0.75, tolerance)
    bound = BoundCheck(low, WARMUP_BASE**r * measure**1.5, tolerance)
    logger.info("Warm-up r=%g: %.6g <= %.6g (margin %.3e)", r, low, bound.rhs, bound.margin)
    return WarmupReport(r, measure, low, holder, bound)


@dataclass(frozen=True)
class ConcentrationReport:
    r: int
    delta: float
    energy: float  # E[f^2]
    measure: float
    low_mass: float  # ||f^{<=r}||_2^2
    influence_hypothesis: bool  # I_S(f^{<=r}) <= delta for every |S| <= r
    global_hypothesis: bool  # f is (r, delta)-global with mu_p(f) < delta
    influence_form: BoundCheck  # low_mass <= 5^r delta^{1/3} E[f^2]
    global_form: BoundCheck  # low_mass <= 10^r delta^{1/3} mu_p(f)

    def _asserted_forms(self) -> list[BoundCheck]:
        forms = []
        if self.influence_hypothesis:
            forms.append(self.influence_form)
        if self.global_hypothesis:
            forms.append(self.global_form)
        return forms

    @property
    def asserted(self) -> bool:
        return self.influence_hypothesis or self.global_hypothesis

    @property
    def bound(self) -> float | None:
        """The tightest bound among the forms whose hypotheses hold."""
        forms = self._asserted_forms()
        return min(form.rhs for form in forms) if forms else None

    @property
    def passed(self) -> bool:
        return all(form.passed for form in self._asserted_forms())


def concentration_check(
    f: CubeFunction, r: int, delta: float, tolerance: float = DEFAULT_TOLERANCE
) -> ConcentrationReport:
    """
    Low-degree mass of a {-1, 0, 1}-valued f against both concentration bounds.

    The 5^r form needs I_S(f^{<=r}) <= delta for every |S| <= r, the empty set included. The
    10^r form needs a boolean f that is (r, delta)-global and sparser than delta.
    """
    if r < 1 or int(r) != r:
        raise ValueError(f"The concentration bounds need an integer r >= 1, got {r}.")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}.")
    if not f.is_signed_boolean():
        raise ValueError("Concentration bounds are defined for functions with values in {-1, 0, 1}.")
    r = int(r)
    low = truncate(forward_transform(f), r)
    low_mass = float(np.sum(np.square(low.coeffs)))
    energy = lr_norm(f, 2) ** 2
    measure = mu_measure(f)

    spectrum = influence_spectrum(low)
    influence_hypothesis = bool(spectrum[popcounts(f.n) <= r].max() <= delta + MEASURE_ATOL)
    global_hypothesis = f.is_boolean() and measure < delta and globalness(f, r, delta).is_global

    cube_root = delta ** (1.0 / 3.0)
    report = ConcentrationReport(
        r,
        delta,
        energy,
        measure,
        low_mass,
        influence_hypothesis,
        global_hypothesis,
        BoundCheck(low_mass, INFLUENCE_FORM_BASE**r * cube_root * energy, tolerance),
        BoundCheck(low_mass, GLOBAL_FORM_BASE**r * cube_root * measure, tolerance),
    )
    if not report.asserted:
        logger.info("Concentration r=%d delta=%g: neither hypothesis holds, nothing asserted", r, delta)
    elif not report.passed:
        logger.warning("Concentration bound fails at r=%d delta=%g: low mass %.6g", r, delta, low_mass)
    else:
        logger.info("Concentration r=%d delta=%g: %.6g <= %.6g", r, delta, low_mass, report.bound)
    return report


def _largest_low_influence(F: SpectralForm, r: int) -> float:
    spectrum = influence_spectrum(truncate(F, r))
    sizes = popcounts(F.n)
    keep = (sizes >= 1) & (sizes <= r)
    return float(spectrum[keep].max()) if np.any(keep) else 0.0


def normtruncate_check(
    f: CubeFunction, r: int, delta: float | None = None, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """
    ||f^{<=r}||_2^2 <= mu_p(f)^2 + 5^{r-1} delta^{1/3} sigma^2 I[f] for boolean f, where delta
    bounds I_S(f^{<=r}) over nonempty |S| <= r. delta defaults to the largest such influence.
    """
    if r < 0 or int(r) != r:
        raise ValueError(f"Truncation degree must be a non-negative integer, got {r}.")
    if not f.is_boolean():
        raise ValueError("The truncation bound is defined for boolean functions only.")
    r = int(r)
    F = forward_transform(f)
    witnessed = _largest_low_influence(F, r)
    if delta is None:
        delta = witnessed
    elif delta < witnessed * (1.0 - 1e-12):
        raise ValueError(
            f"delta={delta} is below the largest influence {witnessed} of f^{{<=r}} over 1 <= |S| <= {r}."
        )
    measure = mu_measure(f)
    influence_term = INFLUENCE_FORM_BASE ** (r - 1) * delta ** (1.0 / 3.0) * f.cube.sigma**2 * total_influence(f)
    check = BoundCheck(low_degree_mass(F, r), measure**2 + influence_term, tolerance)
    logger.info("Truncation bound r=%d delta=%g: margin %.3e", r, delta, check.margin)
    return check


def concentration_ratio(f: CubeFunction, r: int) -> float:
    """epsilon with ||f^{<=r}||_2^2 = epsilon ||f||_2^2, the concentration level of f above degree r."""
    energy = lr_norm(f, 2) ** 2
    if energy <= 0.0:
        raise ValueError("The concentration ratio needs E[f^2] > 0.")
    return low_degree_mass(forward_transform(f), r) / energy
