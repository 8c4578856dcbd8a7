"""
Globalness of boolean functions and the lemmas that move between its two forms.

A boolean f is (r, delta)-global when fixing any r or fewer coordinates to 1 raises its
measure by at most delta. The alternative form bounds the generalised influences I_S(f)
for small nonempty S. ``equivalence_suite`` decides which lemma hypotheses an instance meets
and checks the matching conclusions exactly.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from cube_core.bits import lowest_argmax, masks_up_to, members, popcounts
from cube_core.models import CubeFunction
from cube_core.transform import forward_transform, is_monotone, mu_measure, restrict, restricted_measures

from .influences import influence_spectrum

logger = logging.getLogger(__name__)

# Slack for comparing measures that are computed as sums of products.
MEASURE_ATOL = 1e-12


@dataclass(frozen=True)
class GlobalnessReport:
    r: int
    delta: float
    is_global: bool
    measure: float
    max_bump: float  # largest mu_p(f_{J->1}) - mu_p(f) over |J| <= r
    worst_set: int  # mask attaining max_bump, lowest mask on ties
    witness: tuple[int, float] | None = None  # (J, mu_p(f_{J->1})) when not global


def _require_boolean(f: CubeFunction, what: str) -> None:
    if not f.is_boolean():
        raise ValueError(f"{what} is defined for boolean functions only.")


def _largest_bump(f: CubeFunction, r: int) -> tuple[float, int, float, float]:
    restricted = restricted_measures(f)
    measure = float(restricted[0])
    candidates = masks_up_to(f.n, min(r, f.n))
    worst = lowest_argmax(restricted, candidates)
    return float(restricted[worst]) - measure, worst, float(restricted[worst]), measure


def globalness(f: CubeFunction, r: int, delta: float) -> GlobalnessReport:
    """Exhaustive (r, delta)-globalness test over every |J| <= r."""
    _require_boolean(f, "Globalness")
    if r < 0:
        raise ValueError(f"Restriction size r must be non-negative, got {r}.")
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}.")
    bump, worst, worst_measure, measure = _largest_bump(f, r)
    is_global = bump <= delta + MEASURE_ATOL
    witness = None if is_global else (worst, worst_measure)
    return GlobalnessReport(r, delta, is_global, measure, bump, worst, witness)


def smallest_global_delta(f: CubeFunction, r: int) -> float:
    """The least delta for which f is (r, delta)-global."""
    _require_boolean(f, "Globalness")
    return max(0.0, _largest_bump(f, r)[0])


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    hypothesis_met: bool
    holds: bool | None = None  # None when the hypothesis is not met
    margin: float | None = None  # smallest slack of the conclusion over every quantified set
    detail: str = ""


@dataclass(frozen=True)
class EquivalenceReport:
    r: int
    delta_global: float
    delta_influence: float
    checks: list[LemmaCheck] = field(default_factory=list)

    @property
    def violations(self) -> list[LemmaCheck]:
        return [c for c in self.checks if c.hypothesis_met and not c.holds]

    def check(self, name: str) -> LemmaCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _unmet(name: str) -> LemmaCheck:
    return LemmaCheck(name, False, detail="hypothesis not met")


def _restriction_lemma(f: CubeFunction, r: int, delta: float) -> list[LemmaCheck]:
    """The three inheritance statements for a monotone (r, delta)-global f, each over every coordinate i."""
    p = f.cube.p
    measure = mu_measure(f)
    margins = {"restrict.one": np.inf, "restrict.measure": np.inf, "restrict.zero": np.inf}
    for i in range(f.n):
        up = restrict(f, [i], [1])
        down = restrict(f, [i], [0])
        down_measure = mu_measure(down)
        margins["restrict.measure"] = min(
            margins["restrict.measure"], down_measure - (measure - p * delta / (1.0 - p))
        )
        if r >= 1:
            bump_up = smallest_global_delta(up, r - 1)
            bump_down = smallest_global_delta(down, r - 1)
            margins["restrict.one"] = min(margins["restrict.one"], delta - bump_up)
            margins["restrict.zero"] = min(margins["restrict.zero"], delta / (1.0 - p) - bump_down)
    checks = []
    for name, margin in margins.items():
        if np.isinf(margin):
            checks.append(LemmaCheck(name, True, True, None, "vacuous"))
        else:
            checks.append(LemmaCheck(name, True, bool(margin >= -MEASURE_ATOL), float(margin)))
    return checks


def equivalence_suite(f: CubeFunction, r: int, delta: float | None = None) -> EquivalenceReport:
    """
    Checks every globalness/influence lemma whose hypothesis f meets.

    Without ``delta`` the smallest admissible values are used: the largest restriction bump
    over |J| <= r for the globalness lemmas, and the largest nonempty I_S with |S| <= r for the
    converse. Lemmas whose hypothesis fails are reported with ``hypothesis_met=False``.
    """
    _require_boolean(f, "The equivalence lemmas")
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}.")
    n = f.n
    sizes = popcounts(n)
    small = masks_up_to(n, min(r, n))
    small_nonempty = small[small != 0]

    bump = max(0.0, _largest_bump(f, r)[0])
    spectrum = influence_spectrum(f)
    delta_global = bump if delta is None else float(delta)
    delta_influence = float(spectrum[small_nonempty].max()) if small_nonempty.size else 0.0
    if delta is not None:
        delta_influence = float(delta)
    measure = mu_measure(f)
    is_global = bump <= delta_global + MEASURE_ATOL
    checks: list[LemmaCheck] = []

    # Sparse case: I_S(f^{<=r}) <= I_S(f) <= 8^r delta for every |S| <= r.
    if is_global and measure <= delta_global + MEASURE_ATOL:
        F = forward_transform(f)
        truncated = F.with_coeffs(np.where(sizes <= r, F.coeffs, 0.0))
        low = influence_spectrum(truncated)[small]
        full = spectrum[small]
        margin = float(min(np.min(full - low), np.min(8.0**r * delta_global - full)))
        checks.append(LemmaCheck("sparse", True, margin >= -MEASURE_ATOL, margin))
    else:
        checks.append(_unmet("sparse"))

    # Monotone case: I_S(f) <= 8^|S| delta for nonempty |S| <= r (the induction gives 8^|S| <= 8^r).
    monotone = is_monotone(f)
    if monotone and is_global:
        if small_nonempty.size:
            bound = 8.0 ** sizes[small_nonempty] * delta_global
            margin = float(np.min(bound - spectrum[small_nonempty]))
            checks.append(LemmaCheck("monotone", True, margin >= -MEASURE_ATOL, margin))
        else:
            checks.append(LemmaCheck("monotone", True, True, None, "vacuous: r = 0"))
        checks.extend(_restriction_lemma(f, r, delta_global))
    else:
        checks.append(_unmet("monotone"))
        checks.extend(_unmet(name) for name in ("restrict.one", "restrict.measure", "restrict.zero"))

    # Converse: small nonempty influences make f (r, 4^r delta)-global.
    if r > 0 and small_nonempty.size and np.all(spectrum[small_nonempty] <= delta_influence + MEASURE_ATOL):
        margin = 4.0**r * delta_influence - bump
        checks.append(LemmaCheck("converse", True, margin >= -MEASURE_ATOL, float(margin)))
    else:
        checks.append(_unmet("converse"))

    for c in checks:
        if c.hypothesis_met and not c.holds:
            logger.warning("Equivalence lemma %s fails on n=%d (margin %.3e)", c.name, n, c.margin)
    logger.info(
        "Equivalence suite r=%d: %s",
        r,
        ", ".join(f"{c.name}={'met' if c.hypothesis_met else 'unmet'}" for c in checks),
    )
    return EquivalenceReport(r, delta_global, delta_influence, checks)


def describe_witness(report: GlobalnessReport) -> str:
    if report.witness is None:
        return f"(r={report.r}, delta={report.delta:g})-global"
    mask, value = report.witness
    return f"not global: fixing {members(mask)} to 1 gives measure {value:.6g}"
