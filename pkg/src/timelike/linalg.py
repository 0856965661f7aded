"""Exact linear algebra over the rationals.

Row reduction is fraction-free (Bareiss): rows are scaled to integers and
every elimination step divides exactly by the previous pivot, so entries
stay integral and bounded by minors of the input.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

__all__ = ["integer_rows", "bareiss_echelon", "rank", "nullspace"]


def integer_rows(matrix: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    rows = []
    for row in matrix:
        row = [Fraction(x) for x in row]
        m = 1
        for x in row:
            m = lcm(m, x.denominator)
        rows.append([int(x * m) for x in row])
    return rows


def bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the echelon rows (zero rows dropped) and the pivot columns.
    """
    a = [list(r) for r in rows]
    if not a:
        return [], []
    n_rows, n_cols = len(a), len(a[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, n_rows):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c, n_cols):
                # exact by Sylvester's identity
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        pivots.append(c)
        prev = p
        r += 1
    return a[:r], pivots


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    if not matrix:
        return 0
    _, pivots = bareiss_echelon(integer_rows(matrix))
    return len(pivots)


def _primitive(vec: list[Fraction]) -> tuple[Fraction, ...]:
    m = 1
    for x in vec:
        m = lcm(m, x.denominator)
    ints = [int(x * m) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g:
        ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints)


def nullspace(matrix: Sequence[Sequence[Fraction]], n_cols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of ``{x : matrix @ x == 0}`` as primitive integer vectors.

    One vector per free column, in column order; the free coordinate of
    each vector is positive and the other free coordinates are zero.
    """
    if n_cols is None:
        if not matrix:
            raise ValueError("n_cols is required for an empty matrix")
        n_cols = len(matrix[0])
    if not matrix:
        echelon, pivots = [], []
    else:
        echelon, pivots = bareiss_echelon(integer_rows(matrix))
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        x = [Fraction(0)] * n_cols
        x[fcol] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = echelon[r]
            s = sum((row[j] * x[j] for j in range(pc + 1, n_cols) if row[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(_primitive(x))
    return basis
