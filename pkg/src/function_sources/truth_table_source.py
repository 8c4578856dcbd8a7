"""
Truth-table files.

Line 1 holds ``n p``; then come the 2^n values, one per line, in index order (bit i of the
index is coordinate i). Blank lines and lines starting with ``#`` are skipped.
"""

import os
from collections.abc import Iterator

from cube_core.models import BiasedCube, CubeFunction
from verification_core.converters import instance_id
from verification_core.interfaces import AbstractFunctionSource
from verification_core.models import Instance, Params


def content_lines(path: str) -> Iterator[tuple[int, str]]:
    """(line number, stripped text) for every line that carries data."""
    with open(path, encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            text = raw.strip()
            if text and not text.startswith("#"):
                yield number, text


def parse_number(text: str, kind, path: str, number: int):
    try:
        return kind(text)
    except ValueError as e:
        raise ValueError(f"{path}:{number}: expected {kind.__name__}, got {text!r}.") from e


def read_truth_table(path: str, p: float | None = None) -> CubeFunction:
    lines = content_lines(path)
    header = next(lines, None)
    if header is None:
        raise ValueError(f"{path}: empty truth table.")
    number, text = header
    fields = text.split()
    if len(fields) != 2:
        raise ValueError(f"{path}:{number}: the header must read 'n p', got {text!r}.")
    n = parse_number(fields[0], int, path, number)
    bias = parse_number(fields[1], float, path, number) if p is None else p
    try:
        cube = BiasedCube(n, bias)
    except ValueError as e:
        raise ValueError(f"{path}:{number}: {e}") from e
    values = [parse_number(text, float, path, number) for number, text in lines]
    if len(values) != cube.size:
        raise ValueError(f"{path}: expected {cube.size} values for n={n}, found {len(values)}.")
    return CubeFunction(cube, values)


def write_truth_table(f: CubeFunction, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{f.n} {f.cube.p!r}\n")
        for value in f.values:
            fh.write(f"{float(value)!r}\n")


class TruthTableSource(AbstractFunctionSource):
    """A function read from a truth-table file; a sweep may reread it under another bias."""

    def __init__(self, path: str, p: float | None = None):
        if not os.path.exists(path):
            raise FileNotFoundError(f"Truth table not found: {path}")
        self.path = path
        self.p = p

    def parameters(self) -> set[str]:
        return {"p"}

    def load(self, overrides: Params | None = None) -> Instance:
        overrides = overrides or {}
        p = overrides.get("p", self.p)
        f = read_truth_table(self.path, None if p is None else float(p))
        shown = {"p": p} if p is not None else {}
        return Instance(instance_id(os.path.basename(self.path), shown), f)
