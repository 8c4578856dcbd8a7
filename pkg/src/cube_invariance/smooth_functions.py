"""Smooth test functions phi, each carrying a certified bound on sup |phi'''|."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

SIGMOID = "sigmoid"
STEP = "step"


@dataclass(frozen=True)
class TestFunction:
    """
    phi with a trusted certificate for sup |phi'''|. ``range_width`` bounds sup phi - inf phi,
    which caps |E phi(A) - E phi(B)| for any A and B.
    """

    __test__ = False

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    third_derivative_bound: float
    range_width: float = math.inf

    def __post_init__(self):
        if not self.third_derivative_bound >= 0:
            raise ValueError(f"The certificate must be non-negative, got {self.third_derivative_bound}.")

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(np.asarray(x, dtype=float))


def sigmoid(scale: float = 1.0) -> TestFunction:
    """The logistic curve 1 / (1 + e^{-x/scale}); its third derivative peaks at 1/8 in absolute value."""
    if not scale > 0:
        raise ValueError(f"The sigmoid scale must be positive, got {scale}.")

    def evaluate(x: np.ndarray) -> np.ndarray:
        return 0.5 * (1.0 + np.tanh(x / (2.0 * scale)))

    return TestFunction(f"{SIGMOID}:{scale:g}", evaluate, 1.0 / (8.0 * scale**3), 1.0)


def smooth_step(width: float = 1.0) -> TestFunction:
    """
    A C^2 step from 0 to 1 across [-width/2, width/2]: the integral of the quadratic B-spline on
    three knot intervals of length h = width/3. The third derivative takes the values
    1/h^3, -2/h^3, 1/h^3 on the three pieces.
    """
    if not width > 0:
        raise ValueError(f"The step width must be positive, got {width}.")
    h = width / 3.0

    def evaluate(x: np.ndarray) -> np.ndarray:
        u = np.clip((x + width / 2.0) / h, 0.0, 3.0)
        return np.select(
            [u <= 1.0, u <= 2.0],
            [u**3 / 6.0, (-2.0 * u**3 + 9.0 * u**2 - 9.0 * u + 3.0) / 6.0],
            1.0 - (3.0 - u) ** 3 / 6.0,
        )

    return TestFunction(f"{STEP}:{width:g}", evaluate, 54.0 / width**3, 1.0)


def parse_test_function(spec: str) -> TestFunction:
    """``sigmoid[:<scale>]`` or ``step[:<width>]``."""
    kind, _, arg = spec.strip().partition(":")
    builders = {SIGMOID: sigmoid, STEP: smooth_step}
    if kind.strip().lower() not in builders:
        raise ValueError(f"Unknown test function {spec!r}; use sigmoid[:<scale>] or step[:<width>].")
    try:
        value = float(arg) if arg else 1.0
    except ValueError as e:
        raise ValueError(f"Malformed test function parameter in {spec!r}.") from e
    return builders[kind.strip().lower()](value)
