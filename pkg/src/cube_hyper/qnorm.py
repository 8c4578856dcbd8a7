"""
Hypercontractivity for even q-th moments.

The random variables Z_i of the general statements are instantiated as biased characters:
coordinate i carries the p_i-biased character, whose q-th moment is at most sigma_i^{2-q}
with sigma_i = sqrt(p_i (1 - p_i)). A MomentEnvelope records the sigma_i a bound is taken with.
Only even integer q is supported, since then every norm is a polynomial moment of the table.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from cube_core.bits import popcounts, subset_products, superset_sums
from cube_core.cube_config import DEFAULT_TOLERANCE
from cube_core.models import BoundCheck, CubeFunction
from cube_core.transform import forward_transform, inverse_butterflies, lr_norm, product_weights

from .fourth_moment import _degree_and_delta, _energy

logger = logging.getLogger(__name__)


def check_even_q(q) -> int:
    if int(q) != q or int(q) < 4 or int(q) % 2:
        raise ValueError(f"Exact q-norm checks need an even integer q >= 4, got {q}.")
    return int(q)


def q_rho_max(q: int) -> float:
    return (2.0 * q) ** -1.5


def character_moment(p: float, q: float) -> float:
    """E|chi|^q for the p-biased character."""
    sigma = math.sqrt(p * (1.0 - p))
    return (1.0 - p) * (p / sigma) ** q + p * ((1.0 - p) / sigma) ** q


@dataclass(frozen=True)
class MomentEnvelope:
    """Per-coordinate sigma_i encoding E|Z_i|^q <= sigma_i^{2-q}."""

    sigmas: tuple[float, ...]
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"Moment envelopes need q >= 2, got {self.q}.")
        for s in self.sigmas:
            if not 0.0 < s <= 0.5:
                raise ValueError(f"Envelope sigmas must lie in (0, 1/2], got {s}.")

    @classmethod
    def for_biases(cls, biases: Sequence[float], q: int) -> "MomentEnvelope":
        return cls(tuple(math.sqrt(p * (1.0 - p)) for p in biases), q)

    def sigma_S(self, mask: int) -> float:
        return math.prod(s for i, s in enumerate(self.sigmas) if mask >> i & 1)

    def weights(self) -> np.ndarray:
        """The table S -> sigma_S^{2-q}."""
        return subset_products([s ** (2 - self.q) for s in self.sigmas])

    def admits(self, biases: Sequence[float]) -> bool:
        """Whether every biased character meets its envelope moment."""
        if len(biases) != len(self.sigmas):
            return False
        return all(
            character_moment(p, self.q) <= s ** (2 - self.q) * (1.0 + 1e-12)
            for p, s in zip(biases, self.sigmas, strict=True)
        )


def _check_rho(q: int, rho: float) -> None:
    if not 0.0 <= rho <= q_rho_max(q) * (1.0 + 1e-12):
        raise ValueError(f"rho must lie in [0, (2q)^-1.5] = [0, {q_rho_max(q):.6g}] for q={q}, got {rho}.")


@dataclass(frozen=True)
class QNormReport:
    q: int
    rho: float
    beta: float
    moment_form: BoundCheck  # ||T_rho f||_q^q <= sum sigma_S^{2-q} ||D_S f||_2^q
    beta_form: BoundCheck  # ||T_rho f||_q <= beta^{(q-2)/(2q)} ||f||_2

    @property
    def passed(self) -> bool:
        return self.moment_form.passed and self.beta_form.passed


def _qnorm_report(
    coeffs: np.ndarray, biases: Sequence[float], q: int, rho: float, envelope: MomentEnvelope, tolerance: float
) -> QNormReport:
    n = len(biases)
    noisy = inverse_butterflies(coeffs * rho ** popcounts(n), biases)
    weights = product_weights(biases)
    lhs = float(np.dot(noisy**q, weights))
    W = superset_sums(np.square(coeffs))
    rhs = float(np.dot(envelope.weights(), W ** (q / 2.0)))
    energy = float(W[0])
    if energy <= 0.0:
        raise ValueError("The q-norm bound needs a nonzero function.")
    sigma_sq = subset_products([s**2 for s in envelope.sigmas])
    beta = float(np.max(W / sigma_sq)) / energy
    beta_form = BoundCheck(lhs ** (1.0 / q), beta ** ((q - 2) / (2.0 * q)) * energy**0.5, tolerance)
    return QNormReport(q, rho, beta, BoundCheck(lhs, rhs, tolerance), beta_form)


def qnorm_bound_check(
    f: CubeFunction,
    q: int,
    rho: float,
    envelope: MomentEnvelope | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> QNormReport:
    """
    ||T_rho f||_q^q <= sum_S sigma_S^{2-q} ||D_S f||_2^q for even q and rho <= (2q)^{-1.5}, together
    with its consequence ||T_rho f||_q <= beta^{(q-2)/(2q)} ||f||_2 where I_S(f) <= beta ||f||_2^2.

    The envelope defaults to sigma on every coordinate; a custom one must admit the characters.
    """
    q = check_even_q(q)
    _check_rho(q, rho)
    biases = [f.cube.p] * f.n
    if envelope is None:
        envelope = MomentEnvelope.for_biases(biases, q)
    elif envelope.q != q or not envelope.admits(biases):
        raise ValueError("The envelope does not bound the q-th moments of the characters of this cube.")
    report = _qnorm_report(forward_transform(f).coeffs, biases, q, rho, envelope, tolerance)
    logger.info(
        "q-norm bound q=%d rho=%g: margin %.3e, beta form margin %.3e",
        q,
        rho,
        report.moment_form.margin,
        report.beta_form.margin,
    )
    return report


def mixed_bias_qnorm_check(
    coeffs: Sequence[float], biases: Sequence[float], q: int, rho: float, tolerance: float = DEFAULT_TOLERANCE
) -> QNormReport:
    """
    The heterogeneous form: f = sum_S a_S prod_{i in S} chi^{p_i}_i with sigma_i = sigma(p_i), so
    the bound reads sum_S sigma_S^{2-q} ||D_S f||_2^q with a different sigma on every coordinate.
    """
    q = check_even_q(q)
    _check_rho(q, rho)
    for p in biases:
        if not 0.0 < p <= 0.5:
            raise ValueError(f"Every bias must lie in (0, 1/2], got {p}.")
    a = np.asarray(coeffs, dtype=float).reshape(-1)
    if a.size != 1 << len(biases):
        raise ValueError(f"Expected {1 << len(biases)} coefficients for {len(biases)} biases, got {a.size}.")
    return _qnorm_report(a, list(biases), q, rho, MomentEnvelope.for_biases(biases, q), tolerance)


def qnorm_practice_check(
    f: CubeFunction, q: int, delta: float | None = None, r: int | None = None, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """||f||_q <= (2q)^{1.5 r} delta^{(q-2)/(2q)} ||f||_2^{2/q} for degree-r f with I_S(f) <= delta, |S| <= r."""
    q = check_even_q(q)
    r, delta = _degree_and_delta(f, r, delta)
    _energy(f)
    rhs = (2.0 * q) ** (1.5 * r) * delta ** ((q - 2) / (2.0 * q)) * lr_norm(f, 2) ** (2.0 / q)
    return BoundCheck(lr_norm(f, q), rhs, tolerance)


def single_coordinate_moment_check(
    e: float, d: float, p: float, q: int, rho: float, tolerance: float = DEFAULT_TOLERANCE
) -> BoundCheck:
    """
    The one-coordinate step: ||e + rho d Z||_q^q <= ||e + d U||_q^q + sigma^{2-q} |d|^q for rho < 1/(2q),
    with Z the p-biased character and U the uniform one.
    """
    q = check_even_q(q)
    if not 0.0 < rho < 1.0 / (2.0 * q):
        raise ValueError(f"rho must lie in (0, 1/(2q)) = (0, {1.0 / (2.0 * q):.6g}), got {rho}.")
    if not 0.0 < p <= 0.5:
        raise ValueError(f"p must lie in (0, 1/2], got {p}.")
    sigma = math.sqrt(p * (1.0 - p))
    lhs = float(np.dot(np.abs(inverse_butterflies([e, rho * d], [p])) ** q, [1.0 - p, p]))
    uniform = float(np.mean(np.abs(inverse_butterflies([e, d], [0.5])) ** q))
    return BoundCheck(lhs, uniform + sigma ** (2 - q) * abs(d) ** q, tolerance)

