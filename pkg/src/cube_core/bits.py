"""
Bitmask helpers for dense tables indexed by subsets of coordinates.

Entry ``m`` of a table of length ``2**n`` belongs to the point (or the subset)
whose coordinate ``i`` is bit ``i`` of ``m``. Coordinate 0 is the lowest bit and
corresponds to the first coordinate x_1 in the usual notation.
"""

from collections.abc import Iterable

import numpy as np


def dimension_of(length: int) -> int:
    """Returns n for a table of length 2**n."""
    if length < 1 or length & (length - 1):
        raise ValueError(f"Table length must be a power of two, got {length}.")
    return length.bit_length() - 1


def popcounts(n: int) -> np.ndarray:
    """
    Returns the array of |m| for every mask m < 2**n.

    Parallel bit count on 32-bit words; n never exceeds the dimension cap.
    """
    zs = np.arange(1 << n, dtype=np.uint32)
    zs = zs - ((zs >> 1) & 0x55555555)
    zs = (zs & 0x33333333) + ((zs >> 2) & 0x33333333)
    zs = (((zs + (zs >> 4)) & 0x0F0F0F0F) * 0x01010101) >> 24
    return zs.astype(np.int64)


def mask_of(coords: Iterable[int]) -> int:
    mask = 0
    for i in coords:
        if i < 0:
            raise ValueError(f"Coordinates are numbered from 0, got {i}.")
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    """Lists the coordinates of a mask in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def masks_up_to(n: int, r: int) -> np.ndarray:
    """All masks over n coordinates with at most r members, ascending."""
    sizes = popcounts(n)
    return np.flatnonzero(sizes <= r)


def pair_view(table: np.ndarray, i: int) -> np.ndarray:
    """
    Reshapes a flat table so that axis 1 is coordinate i.

    ``view[:, 0, :]`` holds the entries with bit i cleared and ``view[:, 1, :]``
    the entries with bit i set. The result is a view when ``table`` is contiguous.
    """
    return table.reshape(-1, 2, 1 << i)


def superset_sums(table: np.ndarray) -> np.ndarray:
    """Zeta transform over supersets: out[S] = sum of table[E] over E containing S."""
    out = np.array(table, dtype=float, copy=True)
    n = dimension_of(out.size)
    for i in range(n):
        v = pair_view(out, i)
        v[:, 0, :] += v[:, 1, :]
    return out


def subset_sums(table: np.ndarray) -> np.ndarray:
    """Zeta transform over subsets: out[S] = sum of table[J] over J contained in S."""
    out = np.array(table, dtype=float, copy=True)
    n = dimension_of(out.size)
    for i in range(n):
        v = pair_view(out, i)
        v[:, 1, :] += v[:, 0, :]
    return out


def lowest_argmax(values: np.ndarray, candidates: np.ndarray, rtol: float = 1e-12) -> int:
    """
    Returns the candidate index with the largest value; the lowest mask wins ties.

    Values within rtol * max(1, |best|) of the best count as tied, so rounding in the zeta
    transforms does not decide the winner.
    """
    sub = values[candidates]
    best = float(sub.max())
    tied = np.flatnonzero(sub >= best - rtol * max(1.0, abs(best)))
    return int(candidates[tied].min())


def subset_products(factors) -> np.ndarray:
    """out[S] = product of factors[i] over i in S; out[0] = 1."""
    out = np.ones(1)
    for a in factors:
        out = np.concatenate([out, out * a])
    return out
