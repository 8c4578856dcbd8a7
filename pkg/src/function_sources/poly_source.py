"""
Polynomial files: one ``mask value`` pair per line, the mask naming the monomial's variables
(bit i is variable i). ``#`` comments and blank lines are skipped.
"""

import os

from cube_invariance.polynomials import MultilinearPoly
from verification_core.interfaces import AbstractFunctionSource
from verification_core.models import Instance, Params

from .truth_table_source import content_lines, parse_number


def read_poly(path: str, n: int | None = None) -> MultilinearPoly:
    """Reads the terms; n defaults to the highest variable used plus one."""
    terms: list[tuple[int, float]] = []
    for number, text in content_lines(path):
        fields = text.split()
        if len(fields) != 2:
            raise ValueError(f"{path}:{number}: expected 'mask value', got {text!r}.")
        mask = parse_number(fields[0], int, path, number)
        if mask < 0:
            raise ValueError(f"{path}:{number}: masks are non-negative, got {mask}.")
        terms.append((mask, parse_number(fields[1], float, path, number)))
    width = max((mask.bit_length() for mask, _ in terms), default=0)
    if n is None:
        n = width
    elif n < width:
        raise ValueError(f"{path}: the terms use {width} variables but n={n}.")
    return MultilinearPoly(n, tuple(terms))


def write_poly(f: MultilinearPoly, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for mask, value in f.terms:
            fh.write(f"{mask} {value!r}\n")


class PolySource(AbstractFunctionSource):
    def __init__(self, path: str, n: int | None = None):
        if not os.path.exists(path):
            raise FileNotFoundError(f"Polynomial file not found: {path}")
        self.path = path
        self.n = n

    def parameters(self) -> set[str]:
        return {"n"}

    def load(self, overrides: Params | None = None) -> Instance:
        n = (overrides or {}).get("n", self.n)
        f = read_poly(self.path, None if n is None else int(n))
        label = os.path.basename(self.path)
        return Instance(label if n is None else f"{label}@n={n}", f)
