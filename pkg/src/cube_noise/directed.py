"""
The directed noise operator T^{p->q} and its coupling D(p, q).

D(p, q) is the distribution on pairs (x, y) with x ~ mu_p, y ~ mu_q and x <= y coordinatewise.
Only the marginals and the order constraint are given, and together they pin down the
per-coordinate conditionals:

    given y_i = 0:  x_i = 0
    given y_i = 1:  x_i = 1 with probability p / q
    given x_i = 1:  y_i = 1
    given x_i = 0:  y_i = 1 with probability (q - p) / (1 - p)

T^{p->q} f(y) = E[f(x) | y] uses the first pair and its adjoint T^{q->p} g(x) = E[g(y) | x]
the second. Composing them gives T_rho on mu_p with rho = p(1 - q) / (q(1 - p)).
"""

import logging
from dataclasses import dataclass

import numpy as np

from cube_core.bits import pair_view
from cube_core.models import BiasedCube, CubeFunction

from .operators import apply_noise

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirectedOperator:
    p: float  # source bias
    q: float  # target bias

    def __post_init__(self):
        if not 0.0 < self.p < self.q < 1.0:
            raise ValueError(f"The directed operator needs 0 < p < q < 1, got p={self.p}, q={self.q}.")

    @property
    def rho(self) -> float:
        return self.p * (1.0 - self.q) / (self.q * (1.0 - self.p))

    def source(self, n: int) -> BiasedCube:
        return BiasedCube(n, self.p, allow_upper=True)

    def target(self, n: int) -> BiasedCube:
        return BiasedCube(n, self.q, allow_upper=True)

    def apply(self, f: CubeFunction) -> CubeFunction:
        return directed_apply(f, self)

    def coapply(self, g: CubeFunction) -> CubeFunction:
        return directed_coapply(g, self)


def _check_bias(actual: float, expected: float, what: str) -> None:
    if abs(actual - expected) > 1e-15:
        raise ValueError(f"{what} must live on the {expected}-biased cube, got bias {actual}.")


def directed_apply(f: CubeFunction, op: DirectedOperator) -> CubeFunction:
    """T^{p->q} f, a function on the q-biased cube."""
    _check_bias(f.cube.p, op.p, "The argument of T^{p->q}")
    keep = op.p / op.q
    out = np.array(f.values, dtype=float, copy=True)
    for i in range(f.n):
        v = pair_view(out, i)
        v[:, 1, :] = keep * v[:, 1, :] + (1.0 - keep) * v[:, 0, :]
    return CubeFunction(op.target(f.n), out)


def directed_coapply(g: CubeFunction, op: DirectedOperator) -> CubeFunction:
    """T^{q->p} g, the adjoint of T^{p->q}; a function on the p-biased cube."""
    _check_bias(g.cube.p, op.q, "The argument of T^{q->p}")
    lift = (op.q - op.p) / (1.0 - op.p)
    out = np.array(g.values, dtype=float, copy=True)
    for i in range(g.n):
        v = pair_view(out, i)
        v[:, 0, :] = lift * v[:, 1, :] + (1.0 - lift) * v[:, 0, :]
    return CubeFunction(op.source(g.n), out)


def calcrho_identity_check(f: CubeFunction, p: float, q: float) -> float:
    """
    Max pointwise deviation between T^{q->p} T^{p->q} f and T_rho f.

    The table of f is read on the p-biased cube whatever its own bias.
    """
    op = DirectedOperator(p, q)
    on_source = CubeFunction(op.source(f.n), f.values)
    round_trip = directed_coapply(directed_apply(on_source, op), op)
    noisy = apply_noise(on_source, op.rho)
    deviation = float(np.max(np.abs(round_trip.values - noisy.values)))
    logger.debug("Directed identity p=%g q=%g rho=%g: deviation %.3e", p, q, op.rho, deviation)
    return deviation


def sample_coupling(p: float, q: float, n: int, size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Draws ``size`` pairs from D(p, q) on n coordinates as two (size, n) arrays of 0/1 bytes.

    Sampling goes through a generator built from ``seed``; no global random state is touched.
    """
    op = DirectedOperator(p, q)
    if n < 0 or size < 0:
        raise ValueError(f"n and size must be non-negative, got n={n}, size={size}.")
    rng = np.random.default_rng(seed)
    y = rng.random((size, n)) < op.q
    x = y & (rng.random((size, n)) < op.p / op.q)
    return x.astype(np.uint8), y.astype(np.uint8)
