"""
The Efron-Stein decomposition f = sum_S f^{=S} and the operators diagonal in it.

f^{subset J} = E_{complement of J} f is built for every J in one pass per coordinate: the
entries without bit t receive E_t of the entries with bit t. Moebius inversion over the subset
lattice then gives f^{=S} = sum_{J subset S} (-1)^{|S - J|} f^{subset J}, also one pass per
coordinate.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from cube_core.bits import popcounts, superset_sums

from .product_config import ES_TABLE_CAP, KERNEL_POINTS_CAP
from .spaces import ProductFunction, ProductSpace, condition_out

logger = logging.getLogger(__name__)

SPECTRAL = "spectral"
COMPOSITION = "composition"
KERNEL = "kernel"


def _lattice_view(stack: np.ndarray, t: int) -> np.ndarray:
    """Axis 1 of the view is bit t of the component mask."""
    return stack.reshape(-1, 2, 1 << t, stack.shape[1])


@dataclass(frozen=True, eq=False)
class ESDecomposition:
    """Row S of ``components`` is the table of f^{=S}."""

    space: ProductSpace
    components: np.ndarray

    def component(self, mask: int) -> ProductFunction:
        return ProductFunction(self.space, self.components[mask])

    @cached_property
    def energies(self) -> np.ndarray:
        """||f^{=S}||_2^2 for every S."""
        return np.square(self.components) @ self.space.weights

    @cached_property
    def laplacian_energies(self) -> np.ndarray:
        """||L_S f||_2^2 = sum over E containing S of ||f^{=E}||_2^2."""
        return superset_sums(self.energies)

    def reconstruct(self) -> np.ndarray:
        return self.components.sum(axis=0)

    def superset_sum(self, mask: int) -> np.ndarray:
        idx = np.arange(self.components.shape[0])
        return self.components[(idx & mask) == mask].sum(axis=0)

    def multiplied(self, multiplier: np.ndarray) -> np.ndarray:
        """sum_S multiplier[S] f^{=S}."""
        return multiplier @ self.components

    def invariant_residuals(self, f: ProductFunction) -> dict[str, float]:
        """Largest deviation from each defining property; all vanish up to rounding."""
        w = self.space.weights
        gram = (self.components * w) @ self.components.T
        off_diagonal = gram - np.diag(np.diag(gram))
        dependence = max(self.component(m).dependence_gap(m) for m in range(self.components.shape[0]))
        return {
            "reconstruction": float(np.max(np.abs(self.reconstruct() - f.values))),
            "dependence": dependence,
            "orthogonality": float(np.max(np.abs(off_diagonal))),
            "parseval": abs(float(np.sum(self.energies)) - f.moment(2)),
        }


def es_decompose(f: ProductFunction) -> ESDecomposition:
    space = f.space
    count = 1 << space.n
    if count * space.size > ES_TABLE_CAP:
        raise ValueError(
            f"The decomposition needs {count} x {space.size} entries, more than the cap {ES_TABLE_CAP}."
        )
    stack = np.tile(f.values, (count, 1))
    for t in range(space.n):
        v = _lattice_view(stack, t)
        upper = np.ascontiguousarray(v[:, 1]).reshape(-1, space.size)
        v[:, 0] = condition_out(upper, space, t).reshape(v[:, 0].shape)
    for t in range(space.n):
        v = _lattice_view(stack, t)
        v[:, 1] -= v[:, 0]
    stack.flags.writeable = False
    logger.debug("Efron-Stein decomposition over %d components of %d points", count, space.size)
    return ESDecomposition(space, stack)


def laplacian(f: ProductFunction, mask: int, method: str = COMPOSITION) -> ProductFunction:
    """L_S f, by composing f -> f - E_t f over t in S or as sum over E containing S of f^{=E}."""
    if not 0 <= mask < 1 << f.space.n:
        raise ValueError(f"Subset mask {mask} is outside a space of {f.space.n} factors.")
    if method == SPECTRAL:
        return f.with_values(es_decompose(f).superset_sum(mask))
    if method != COMPOSITION:
        raise ValueError(f"Unknown Laplacian method {method!r}; use {COMPOSITION!r} or {SPECTRAL!r}.")
    g = f
    for t in range(f.space.n):
        if mask >> t & 1:
            g = g.with_values(g.values - g.condition_out(t).values)
    return g


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"Noise correlation rho must lie in [0, 1], got {rho}.")


def product_noise_kernel(space: ProductSpace, rho: float) -> np.ndarray:
    """
    K[x, y] = Pr[N_rho(x) = y]: each coordinate is kept with probability rho and otherwise
    resampled from its factor. The factor of digit 0 is the innermost Kronecker factor.
    """
    _check_rho(rho)
    if space.size > KERNEL_POINTS_CAP:
        raise ValueError(f"Explicit kernels are limited to {KERNEL_POINTS_CAP} points, got {space.size}.")
    singles = [rho * np.eye(len(nu)) + (1.0 - rho) * np.outer(np.ones(len(nu)), nu) for nu in space.factors]
    return reduce(lambda acc, k: np.kron(k, acc), singles, np.ones((1, 1)))


def product_noise(f: ProductFunction, rho: float, method: str = SPECTRAL) -> ProductFunction:
    """T_rho f = sum_S rho^{|S|} f^{=S}, or the explicit resampling kernel applied to f."""
    _check_rho(rho)
    if method == KERNEL:
        return f.with_values(product_noise_kernel(f.space, rho) @ f.values)
    if method != SPECTRAL:
        raise ValueError(f"Unknown noise method {method!r}; use {SPECTRAL!r} or {KERNEL!r}.")
    return f.with_values(es_decompose(f).multiplied(rho ** popcounts(f.space.n).astype(float)))
