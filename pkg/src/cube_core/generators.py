"""
Named function families on the cube.

Coordinates are numbered from 0. Block families (tribes and their relatives) use the
consecutive blocks {0..w-1}, {w..2w-1}, ...; antitribes_pinned pins the t coordinates
that follow the last block.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bits import popcounts
from .models import BiasedCube, CubeFunction
from .transform import cube_weights

logger = logging.getLogger(__name__)

Params = dict[str, Any]


@dataclass(frozen=True)
class GeneratorKind:
    name: str
    description: str
    defaults: Params = field(default_factory=dict)
    min_dimension: Callable[[Params], int] = lambda params: 1
    build: Callable[[BiasedCube, Params], np.ndarray] = lambda cube, params: np.zeros(cube.size)


def _index(cube: BiasedCube) -> np.ndarray:
    return np.arange(cube.size, dtype=np.int64)


def _block_mask(start: int, width: int) -> int:
    return ((1 << width) - 1) << start


def _prefix_size(params: Params) -> int:
    k = params.get("k")
    if k is None:
        raise ValueError("Give either the dimension n or the number of coordinates k.")
    return int(k)


def _build_constant(cube, params):
    return np.full(cube.size, float(params["c"]))


def _build_dictator(cube, params):
    return ((_index(cube) >> int(params["i"])) & 1).astype(float)


def _build_character(cube, params):
    bit = ((_index(cube) >> int(params["i"])) & 1).astype(float)
    return (bit - cube.p) / cube.sigma


def _build_and(cube, params):
    m = _block_mask(0, _prefix_size(params))
    return ((_index(cube) & m) == m).astype(float)


def _build_or(cube, params):
    m = _block_mask(0, _prefix_size(params))
    return ((_index(cube) & m) != 0).astype(float)


def _build_parity(cube, params):
    m = _block_mask(0, _prefix_size(params))
    odd = popcounts(cube.n)[_index(cube) & m] % 2
    if int(params["signed"]):
        return 1.0 - 2.0 * odd
    return odd.astype(float)


def _build_majority(cube, params):
    k = _prefix_size(params)
    m = _block_mask(0, k)
    return (2 * popcounts(cube.n)[_index(cube) & m] > k).astype(float)


def _tribe_masks(params: Params) -> list[int]:
    s, w = int(params["s"]), int(params["w"])
    if s < 1 or w < 1:
        raise ValueError(f"Tribes need s >= 1 and w >= 1, got s={s}, w={w}.")
    return [_block_mask(j * w, w) for j in range(s)]


def _build_tribes(cube, params):
    idx = _index(cube)
    out = np.zeros(cube.size, dtype=bool)
    for m in _tribe_masks(params):
        out |= (idx & m) == m
    return out.astype(float)


def _build_antitribes(cube, params):
    idx = _index(cube)
    out = np.ones(cube.size, dtype=bool)
    for m in _tribe_masks(params):
        out &= (idx & m) != 0
    return out.astype(float)


def _build_antitribes_pinned(cube, params):
    s, w, t = int(params["s"]), int(params["w"]), int(params["t"])
    pinned = _block_mask(s * w, t)
    return _build_antitribes(cube, params) * ((_index(cube) & pinned) == pinned)


def hamming_threshold(cube: BiasedCube, alpha: float) -> int:
    """
    Returns the t in 0..n+1 for which the ball {|x| >= t} has measure nearest to alpha.

    Ties go to the smaller t, i.e. the larger ball.
    """
    mass = np.bincount(popcounts(cube.n), weights=cube_weights(cube), minlength=cube.n + 1)
    tail = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
    distance = np.abs(tail - alpha)
    return int(np.flatnonzero(distance <= distance.min() + 1e-12)[0])


def _build_hamming_ball(cube, params):
    alpha = float(params["alpha"])
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"Hamming ball measure alpha must lie in [0, 1], got {alpha}.")
    t = hamming_threshold(cube, alpha)
    return (popcounts(cube.n) >= t).astype(float)


def _build_random(cube, params):
    rng = np.random.default_rng(int(params["seed"]))
    return rng.standard_normal(cube.size)


def _build_random_boolean(cube, params):
    rng = np.random.default_rng(int(params["seed"]))
    return rng.integers(0, 2, size=cube.size).astype(float)


GENERATORS: dict[str, GeneratorKind] = {
    kind.name: kind
    for kind in [
        GeneratorKind("constant", "constant function c", {"c": 1.0}, build=_build_constant),
        GeneratorKind(
            "dictator", "x_i", {"i": 0}, min_dimension=lambda pr: int(pr["i"]) + 1, build=_build_dictator
        ),
        GeneratorKind(
            "character",
            "the normalized coordinate (x_i - p) / sigma",
            {"i": 0},
            min_dimension=lambda pr: int(pr["i"]) + 1,
            build=_build_character,
        ),
        GeneratorKind("and", "AND of the first k coordinates", {"k": None}, _prefix_size, _build_and),
        GeneratorKind("or", "OR of the first k coordinates", {"k": None}, _prefix_size, _build_or),
        GeneratorKind(
            "parity",
            "XOR of the first k coordinates; signed=1 gives (-1)^|x|",
            {"k": None, "signed": 0},
            _prefix_size,
            _build_parity,
        ),
        GeneratorKind(
            "majority",
            "1 iff more than half of the first k coordinates are 1",
            {"k": None},
            _prefix_size,
            _build_majority,
        ),
        GeneratorKind(
            "tribes",
            "OR over s disjoint blocks of the AND of w coordinates",
            {"s": 2, "w": 2},
            lambda pr: int(pr["s"]) * int(pr["w"]),
            _build_tribes,
        ),
        GeneratorKind(
            "antitribes",
            "AND over s disjoint blocks of the OR of w coordinates",
            {"s": 2, "w": 2},
            lambda pr: int(pr["s"]) * int(pr["w"]),
            _build_antitribes,
        ),
        GeneratorKind(
            "antitribes_pinned",
            "antitribes times the AND of t further coordinates",
            {"s": 2, "w": 2, "t": 1},
            lambda pr: int(pr["s"]) * int(pr["w"]) + int(pr["t"]),
            _build_antitribes_pinned,
        ),
        GeneratorKind(
            "hamming_ball", "{|x| >= t} with measure nearest alpha", {"alpha": 0.5}, build=_build_hamming_ball
        ),
        GeneratorKind("random", "i.i.d. standard normal values", {"seed": 0}, build=_build_random),
        GeneratorKind("random_boolean", "i.i.d. fair bits", {"seed": 0}, build=_build_random_boolean),
    ]
}


def _coerce(raw: str) -> int | float:
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError as e:
        raise ValueError(f"Generator parameter value {raw!r} is not a number.") from e


def parse_generator_spec(text: str) -> tuple[str, Params]:
    """
    Splits a spec such as ``antitribes:s=2,w=3`` into its kind and parameters.

    The keys ``n`` and ``p`` are accepted alongside the kind's own parameters.
    """
    name, _, rest = text.strip().partition(":")
    name = name.strip()
    if name not in GENERATORS:
        raise ValueError(f"Unknown generator {name!r}. Choose one of: {', '.join(sorted(GENERATORS))}.")
    params: Params = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"Malformed generator parameter {item!r} in {text!r}; expected key=value.")
        key = key.strip()
        if key not in GENERATORS[name].defaults and key not in ("n", "p"):
            raise ValueError(f"Generator {name!r} has no parameter {key!r}.")
        params[key] = _coerce(value.strip())
    return name, params


def generate(kind: str, n: int | None = None, p: float = 0.5, **params) -> CubeFunction:
    """
    Builds a named function. With n omitted the smallest dimension that fits the parameters is used.

    Raises ValueError for an unknown kind or parameter, or when the parameters overflow n.
    """
    if kind not in GENERATORS:
        raise ValueError(f"Unknown generator {kind!r}. Choose one of: {', '.join(sorted(GENERATORS))}.")
    spec = GENERATORS[kind]
    unknown = set(params) - set(spec.defaults)
    if unknown:
        raise ValueError(f"Generator {kind!r} has no parameter(s) {sorted(unknown)}.")
    resolved = {**spec.defaults, **params}
    if "k" in resolved and resolved["k"] is None and n is not None:
        resolved["k"] = n

    needed = spec.min_dimension(resolved)
    if n is None:
        n = needed
    elif needed > n:
        raise ValueError(f"Generator {kind!r} with {params} needs {needed} coordinates but n={n}.")
    cube = BiasedCube(int(n), p)
    logger.debug("Generating %s on n=%d, p=%g with %s", kind, cube.n, cube.p, resolved)
    return CubeFunction(cube, spec.build(cube, resolved))


def generate_from_spec(text: str, n: int | None = None, p: float | None = None) -> CubeFunction:
    """Parses a spec string and builds it; n and p inside the string win over the arguments."""
    kind, params = parse_generator_spec(text)
    spec_n = params.pop("n", None)
    spec_p = params.pop("p", None)
    n = int(spec_n) if spec_n is not None else n
    p = float(spec_p) if spec_p is not None else p
    return generate(kind, n=n, p=0.5 if p is None else p, **params)


# --- Closed forms of the block families ---


def tribes_measure(s: int, w: int, p: float) -> float:
    return 1.0 - (1.0 - p**w) ** s


def antitribes_measure(s: int, w: int, p: float) -> float:
    return (1.0 - (1.0 - p) ** w) ** s


def antitribes_total_influence(s: int, w: int, p: float) -> float:
    """Derivative in p of the antitribes measure."""
    return s * w * (1.0 - p) ** (w - 1) * (1.0 - (1.0 - p) ** w) ** (s - 1)


def pinned_measure(s: int, w: int, t: int, p: float) -> float:
    return p**t * antitribes_measure(s, w, p)


def pinned_total_influence(s: int, w: int, t: int, p: float) -> float:
    pinned_part = t * p ** (t - 1) * antitribes_measure(s, w, p) if t > 0 else 0.0
    return pinned_part + p**t * antitribes_total_influence(s, w, p)
