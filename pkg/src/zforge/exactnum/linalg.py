"""Fraction-free Gauss-Jordan elimination over Q."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = reduce(lambda a, b: a * b // gcd(a, b), (Fraction(v).denominator for v in row), 1)
    return [int(Fraction(v) * den) for v in row]


def _reduce_row(row: list[int]) -> list[int]:
    g = reduce(gcd, row, 0)
    return [v // g for v in row] if g > 1 else row


def rref(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Integer reduced row-echelon form and pivot columns.

    Rows are kept as primitive integer vectors; each pivot row has zeros in
    every other pivot column.  Pivots are chosen column by column in order.
    """
    rows = [_reduce_row(_integer_row(r)) for r in matrix]
    rows = [r for r in rows if any(r)]
    ncols = len(matrix[0]) if matrix else 0
    pivots: list[int] = []
    top = 0
    for col in range(ncols):
        piv = next((i for i in range(top, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[top], rows[piv] = rows[piv], rows[top]
        p = rows[top]
        for i in range(len(rows)):
            if i != top and rows[i][col] != 0:
                a, b = p[col], rows[i][col]
                g = gcd(a, b)
                rows[i] = _reduce_row([(a // g) * x - (b // g) * y for x, y in zip(rows[i], p)])
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return rows[:top], pivots


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    if not matrix:
        return 0
    return len(rref(matrix)[1])


def column_kernel(columns: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of {x : sum_j x_j * columns[j] = 0}, one vector per free column.

    The vector for free column f has x_f = 1 and is zero on every other free
    column, so the first vector returned expresses the earliest dependent
    column in terms of the pivot columns before it.
    """
    if not columns:
        return []
    n = len(columns)
    m = len(columns[0])
    matrix = [[Fraction(columns[j][i]) for j in range(n)] for i in range(m)]
    rows, pivots = rref(matrix)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            x[p] = Fraction(-row[f], row[p])
        basis.append(x)
    return basis
