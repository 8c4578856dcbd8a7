"""
Product-space files.

Line 1 holds the number of factors n. Each of the next n lines reads ``arity p_1 ... p_arity``
for factor t = 0, 1, ...; then come the values, one per line, in mixed-radix order with
factor 0 varying fastest. Blank lines and ``#`` comments are skipped.
"""

import os

from cube_product.spaces import ProductFunction, ProductSpace
from verification_core.interfaces import AbstractFunctionSource
from verification_core.models import Instance, Params

from .truth_table_source import content_lines, parse_number


def read_product_function(path: str) -> ProductFunction:
    lines = content_lines(path)
    header = next(lines, None)
    if header is None:
        raise ValueError(f"{path}: empty product-space file.")
    number, text = header
    n = parse_number(text, int, path, number)
    if n < 0:
        raise ValueError(f"{path}:{number}: the number of factors must be non-negative, got {n}.")
    factors = []
    for t in range(n):
        entry = next(lines, None)
        if entry is None:
            raise ValueError(f"{path}: expected {n} factor lines, found {t}.")
        number, text = entry
        fields = text.split()
        arity = parse_number(fields[0], int, path, number)
        atoms = tuple(parse_number(x, float, path, number) for x in fields[1:])
        if len(atoms) != arity:
            raise ValueError(f"{path}:{number}: factor {t} declares arity {arity} but lists {len(atoms)} atoms.")
        factors.append(atoms)
    try:
        space = ProductSpace(tuple(factors))
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from e
    values = [parse_number(text, float, path, number) for number, text in lines]
    if len(values) != space.size:
        raise ValueError(f"{path}: expected {space.size} values, found {len(values)}.")
    return ProductFunction(space, values)


def write_product_function(f: ProductFunction, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{f.space.n}\n")
        for nu in f.space.factors:
            fh.write(" ".join([str(len(nu)), *(repr(float(a)) for a in nu)]) + "\n")
        for value in f.values:
            fh.write(f"{float(value)!r}\n")


class ProductSource(AbstractFunctionSource):
    def __init__(self, path: str):
        if not os.path.exists(path):
            raise FileNotFoundError(f"Product-space file not found: {path}")
        self.path = path

    def parameters(self) -> set[str]:
        return set()

    def load(self, overrides: Params | None = None) -> Instance:
        return Instance(os.path.basename(self.path), read_product_function(self.path))
