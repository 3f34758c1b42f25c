"""Zeta and Möbius transforms on the subset lattice of a frame.

Set functions are held as numpy object arrays of length 2**n indexed by
membership bits, so entry k is the value on the set whose bit i is bit i of
k. Reshaped to (2,)*n, every axis is one configuration and each transform is
n elementwise passes. Entries stay ``Fraction`` throughout.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

ZERO = Fraction(0)


def empty_table(size: int) -> np.ndarray:
    table = np.empty(1 << size, dtype=object)
    table[:] = ZERO
    return table


def _cube(values: np.ndarray) -> tuple[np.ndarray, int]:
    n = values.size.bit_length() - 1
    if values.size != 1 << n:
        raise ValueError("set-function table length must be a power of two")
    return np.array(values, dtype=object).reshape((2,) * n), n


def _halves(n: int, axis: int):
    lo = [slice(None)] * n
    hi = [slice(None)] * n
    lo[axis] = 0
    hi[axis] = 1
    return tuple(lo), tuple(hi)


def subset_zeta(values: np.ndarray) -> np.ndarray:
    """f(A) = sum of values(B) over B ⊆ A."""
    cube, n = _cube(values)
    for axis in range(n):
        lo, hi = _halves(n, axis)
        cube[hi] = cube[hi] + cube[lo]
    return cube.reshape(-1)


def subset_mobius(values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`subset_zeta`."""
    cube, n = _cube(values)
    for axis in range(n):
        lo, hi = _halves(n, axis)
        cube[hi] = cube[hi] - cube[lo]
    return cube.reshape(-1)


def superset_zeta(values: np.ndarray) -> np.ndarray:
    """f(A) = sum of values(B) over B ⊇ A."""
    cube, n = _cube(values)
    for axis in range(n):
        lo, hi = _halves(n, axis)
        cube[lo] = cube[lo] + cube[hi]
    return cube.reshape(-1)


def superset_mobius(values: np.ndarray) -> np.ndarray:
    cube, n = _cube(values)
    for axis in range(n):
        lo, hi = _halves(n, axis)
        cube[lo] = cube[lo] - cube[hi]
    return cube.reshape(-1)


def intersection_closure(bit_sets) -> set[int]:
    """All nonempty intersections of one or more of the given sets."""
    closure: set[int] = set()
    frontier = {b for b in bit_sets if b}
    while frontier:
        closure |= frontier
        frontier = {a & b for a in closure for b in frontier if a & b} - closure
    return closure
