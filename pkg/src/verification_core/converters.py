"""Adapters between library reports, CLI text and verdict rows."""

import itertools
from typing import Any

import numpy as np

from cube_core.models import BoundCheck, CubeFunction
from cube_core.transform import forward_transform
from cube_influence.globalness import LemmaCheck
from cube_invariance.polynomials import MultilinearPoly
from cube_product.spaces import ProductFunction

from .models import CheckResult, Instance, Params, VerdictRow

CUBE = "cube"
PRODUCT = "product"
POLY = "poly"


def from_bound(theorem: str, check: BoundCheck, asserted: bool = True) -> CheckResult:
    return CheckResult(theorem, float(check.lhs), float(check.rhs), bool(check.passed), asserted)


def from_deviation(theorem: str, deviation: float, tolerance: float, allowed: float = 0.0) -> CheckResult:
    """A deviation that should stay below ``allowed``, within the relative tolerance."""
    return from_bound(theorem, BoundCheck(float(deviation), float(allowed), tolerance))


def from_lemma(check: LemmaCheck) -> CheckResult:
    margin = check.margin if check.margin is not None else 0.0
    passed = bool(check.holds) if check.hypothesis_met else True
    return CheckResult(check.name, 0.0, float(margin), passed, check.hypothesis_met)


def as_input(instance: Instance, kind: str) -> Any:
    """
    The instance's function in the form a command expects. Cube functions lift to binary
    product spaces and, through their Fourier expansion, to multilinear polynomials.
    """
    f = instance.function
    if kind == CUBE and isinstance(f, CubeFunction):
        return f
    if kind == PRODUCT:
        if isinstance(f, ProductFunction):
            return f
        if isinstance(f, CubeFunction):
            return ProductFunction.from_cube(f)
    if kind == POLY:
        if isinstance(f, MultilinearPoly):
            return f
        if isinstance(f, CubeFunction):
            return MultilinearPoly.from_spectral(forward_transform(f))
    raise ValueError(f"{instance.id} ({type(f).__name__}) cannot be used where a {kind} function is expected.")


def coerce_value(raw: str) -> int | float | str:
    text = raw.strip()
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def parse_assignments(items: list[str] | None) -> Params:
    """``key=value`` strings from repeated --param flags."""
    params: Params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"Malformed parameter {item!r}; expected key=value.")
        params[key.strip()] = coerce_value(value)
    return params


def parse_sweep(text: str | None) -> dict[str, list[Any]]:
    """``"key=v1,v2;key2=w1"`` -> {"key": [v1, v2], "key2": [w1]}."""
    sweep: dict[str, list[Any]] = {}
    if not text:
        return sweep
    for part in filter(None, (chunk.strip() for chunk in text.split(";"))):
        key, sep, values = part.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"Malformed sweep entry {part!r}; expected key=v1,v2,...")
        if key in sweep:
            raise ValueError(f"The sweep names {key!r} twice.")
        items = [coerce_value(v) for v in values.split(",") if v.strip()]
        if not items:
            raise ValueError(f"The sweep over {key!r} has no values.")
        sweep[key] = items
    return sweep


def sweep_points(sweep: dict[str, list[Any]]) -> list[Params]:
    """The cartesian product in sorted-parameter order; a single empty point without a sweep."""
    keys = sorted(sweep)
    return [dict(zip(keys, values, strict=True)) for values in itertools.product(*(sweep[k] for k in keys))]


def instance_id(base: str, overrides: Params) -> str:
    if not overrides:
        return base
    return base + "@" + ",".join(f"{k}={overrides[k]}" for k in sorted(overrides))


def to_verdict(instance: Instance, params: Params, result: CheckResult) -> VerdictRow:
    return VerdictRow(
        instance.id,
        result.theorem,
        dict(sorted(params.items())),
        result.lhs,
        result.rhs,
        result.margin,
        result.passed,
        result.asserted,
    )


def plain(value: Any) -> Any:
    """numpy scalars and arrays as built-in Python values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, tuple):
        return list(value)
    return value

