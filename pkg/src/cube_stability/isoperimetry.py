"""
Isoperimetric stability: witnesses for functions of small total influence.

Both searches are exhaustive. The restriction table J -> mu_p(f_{J->1}) and the influence
table S -> I_S(f) are computed once for every subset by a zeta transform, then masked to the
size bound, so no pruning is needed and general and monotone f take the same path.
The theorems' constants are existential; every witness also reports the smallest constant
that works on the instance.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from cube_core.bits import lowest_argmax, masks_up_to, members, popcounts
from cube_core.models import CubeFunction
from cube_core.transform import is_monotone, mu_measure, restricted_measures
from cube_influence.influences import influence_spectrum, total_influence

from .stability_config import (
    BOUNDED_AWAY,
    BOURGAIN_BASE,
    BOURGAIN_EXPONENT,
    BOURGAIN_SIZE_FACTOR,
    KAHN_KALAI_TRIAL_C,
    MONOTONE_TRANSFER_BASE,
)

logger = logging.getLogger(__name__)

RESTRICTION = "restriction"
INFLUENCE = "influence"


@dataclass(frozen=True)
class IsoperimetryWitness:
    kind: str  # RESTRICTION: boost = mu_p(f_{J->1}) or its bump; INFLUENCE: boost = I_S(f)
    K: float
    subset: int
    boost: float
    threshold: float
    size_bound: int
    hypothesis_met: bool
    min_constant: float

    @property
    def size(self) -> int:
        return int(self.subset).bit_count()

    @property
    def found(self) -> bool:
        return self.boost >= self.threshold

    def row(self, instance: str) -> dict:
        return {
            "instance": instance,
            "K": self.K,
            "|J|": self.size,
            "bump": self.boost,
            "threshold": self.threshold,
            "min_constant": self.min_constant,
        }


def _require_boolean(f: CubeFunction) -> None:
    if not f.is_boolean():
        raise ValueError("Isoperimetric searches are defined for boolean functions only.")


def _check_K(K: float) -> None:
    if not K > 0:
        raise ValueError(f"K must be positive, got {K}.")


def best_by_size(table: np.ndarray, n: int) -> np.ndarray:
    """Entry k is the largest table value over masks of size at most k."""
    sizes = popcounts(n)
    per_size = np.full(n + 1, -np.inf)
    np.maximum.at(per_size, sizes, table)
    return np.maximum.accumulate(per_size)


def kahn_kalai_min_constant(restricted: np.ndarray, n: int, K: float) -> float:
    """
    Smallest C such that some |J| <= CK has mu_p(f_{J->1}) >= e^{-CK}, that is
    min over k of max(k / K, -ln(best over |J| <= k) / K).
    """
    best = best_by_size(restricted, n)
    with np.errstate(divide="ignore"):
        needed = -np.log(np.clip(best, 0.0, None)) / K
    return float(np.min(np.maximum(np.arange(n + 1) / K, needed)))


def kahn_kalai_variant_search(
    f: CubeFunction, K: float, C_trial: float = KAHN_KALAI_TRIAL_C
) -> IsoperimetryWitness:
    """
    For pI[f] < K mu_p(f): searches every |J| <= C_trial K for the largest mu_p(f_{J->1}) and
    compares it with e^{-C_trial K}. An unmet hypothesis is reported, never raised.
    """
    _require_boolean(f)
    _check_K(K)
    if not C_trial > 0:
        raise ValueError(f"The trial constant must be positive, got {C_trial}.")
    hypothesis = f.cube.p * total_influence(f) < K * mu_measure(f)
    restricted = restricted_measures(f)
    bound = min(math.floor(C_trial * K), f.n)
    best = lowest_argmax(restricted, masks_up_to(f.n, bound))
    witness = IsoperimetryWitness(
        RESTRICTION,
        K,
        best,
        float(restricted[best]),
        math.exp(-C_trial * K),
        bound,
        hypothesis,
        kahn_kalai_min_constant(restricted, f.n, K),
    )
    logger.info(
        "Kahn-Kalai variant K=%g C=%g: hypothesis %s, best J=%s with mu=%.6g (threshold %.3e), min C %.4g",
        K,
        C_trial,
        "met" if hypothesis else "unmet",
        members(best),
        witness.boost,
        witness.threshold,
        witness.min_constant,
    )
    return witness


@dataclass(frozen=True)
class BourgainReport:
    K: float
    measure: float
    hypothesis_met: bool  # pI[f] <= K mu (1 - mu) with f nonconstant
    bounded_away: bool  # mu inside the configured interval
    influence: IsoperimetryWitness
    restriction: IsoperimetryWitness | None  # monotone f only

    @property
    def passed(self) -> bool:
        if not self.hypothesis_met:
            return True
        found = self.influence.found
        if self.restriction is not None:
            found = found and self.restriction.found
        return found


def _exponent_constant(value: float, K: float) -> float:
    """c with value = 5^{-cK}."""
    if value <= 0.0:
        return math.inf
    return -math.log(value, BOURGAIN_BASE) / K


def bourgain_witness_search(f: CubeFunction, K: float | None = None) -> BourgainReport:
    """
    For pI[f] <= K mu (1 - mu): scans every nonempty |S| <= ceil(2K) for the largest I_S(f) and
    compares it with 5^{-8K}.

    K defaults to pI[f] / (mu (1 - mu)), the smallest value meeting the hypothesis. For monotone f
    the restriction form is searched too: over the same sizes the largest bump
    mu_p(f_{J->1}) - mu_p(f) must reach 5^{-8K} / 8^{ceil(2K)}.
    """
    _require_boolean(f)
    measure = mu_measure(f)
    variance = measure * (1.0 - measure)
    scaled = f.cube.p * total_influence(f)
    if K is None:
        if variance <= 0.0:
            raise ValueError("K cannot be derived for a constant function; give K explicitly.")
        K = scaled / variance
    _check_K(K)
    hypothesis = variance > 0.0 and scaled <= K * variance * (1.0 + 1e-12)
    size = min(math.ceil(BOURGAIN_SIZE_FACTOR * K), f.n)
    threshold = BOURGAIN_BASE ** (-BOURGAIN_EXPONENT * K)

    spectrum = influence_spectrum(f)
    nonempty = masks_up_to(f.n, size)[1:]
    if nonempty.size:
        best = lowest_argmax(spectrum, nonempty)
        boost = float(spectrum[best])
    else:
        best, boost = 0, 0.0
    influence = IsoperimetryWitness(
        INFLUENCE, K, best, boost, threshold, size, hypothesis, _exponent_constant(boost, K)
    )

    restriction = None
    if is_monotone(f):
        bumps = restricted_measures(f) - measure
        best_J = lowest_argmax(bumps, masks_up_to(f.n, size))
        bump = float(bumps[best_J])
        restriction = IsoperimetryWitness(
            RESTRICTION,
            K,
            best_J,
            bump,
            threshold / MONOTONE_TRANSFER_BASE**size,
            size,
            hypothesis,
            _exponent_constant(bump * MONOTONE_TRANSFER_BASE**size, K),
        )

    low, high = BOUNDED_AWAY
    report = BourgainReport(K, measure, hypothesis, low <= measure <= high, influence, restriction)
    logger.info(
        "Bourgain search K=%.6g: hypothesis %s, best S=%s with I_S=%.6g (threshold %.3e)",
        K,
        "met" if hypothesis else "unmet",
        members(best),
        boost,
        threshold,
    )
    if not report.passed:
        logger.warning("No witness within size %d clears the threshold at K=%.6g", size, K)
    return report
