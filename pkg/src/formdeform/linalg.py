"""Exact linear algebra over Q by fraction-free (Bareiss) elimination.

Matrices are lists of rows of ``Fraction`` or ``int``.  Each row is first
cleared of denominators; elimination then runs over the integers, choosing
in every column the candidate pivot of smallest bit length.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import List, Sequence, Tuple

Matrix = List[List[Fraction]]


def _integer_rows(rows: Sequence[Sequence]) -> List[List[int]]:
    out = []
    for row in rows:
        den = 1
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                den = lcm(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def echelon(rows: Sequence[Sequence]) -> Tuple[List[List[int]], List[int]]:
    """Integer row-echelon form and pivot columns of ``rows``."""
    m = _integer_rows(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    prev = 1
    k = 0
    for col in range(ncols):
        if k == len(m):
            break
        cands = [i for i in range(k, len(m)) if m[i][col]]
        if not cands:
            continue
        best = min(cands, key=lambda i: (abs(m[i][col]).bit_length(), i))
        m[k], m[best] = m[best], m[k]
        piv_row = m[k]
        p = piv_row[col]
        for i in range(k + 1, len(m)):
            row = m[i]
            f = row[col]
            for j in range(col + 1, ncols):
                num = p * row[j] - f * piv_row[j]
                val, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("Bareiss step left a remainder")
                row[j] = val
            row[col] = 0
        prev = p
        pivots.append(col)
        k += 1
    return m[:k], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(echelon(rows)[1])


def rref(rows: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row-echelon form over Q (from the integer echelon form)."""
    ech, pivots = echelon(rows)
    red = [[Fraction(v, row[c]) for v in row] for row, c in zip(ech, pivots)]
    for k in range(len(red) - 1, -1, -1):
        c = pivots[k]
        for i in range(k):
            f = red[i][c]
            if f:
                red[i] = [u - f * v for u, v in zip(red[i], red[k])]
    return red, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of ``{v : M v = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row, c in zip(red, pivots):
            v[c] = -row[free]
        basis.append(v)
    return basis


def transpose(rows: Sequence[Sequence], nrows_out: int | None = None) -> Matrix:
    if not rows:
        return [[] for _ in range(nrows_out or 0)]
    return [list(col) for col in zip(*rows)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: int | None = None) -> Matrix:
    """Product of an ``m x k`` and a ``k x p`` matrix; empty shapes allowed via ``inner``."""
    if not a:
        return []
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def is_zero_matrix(m: Sequence[Sequence]) -> bool:
    return all(not v for row in m for v in row)


def span_basis(vectors: Sequence[Sequence]) -> Matrix:
    """A basis (as rows) of the span of ``vectors``."""
    if not vectors:
        return []
    red, _ = rref(vectors)
    return red
