"""Exact rational linear algebra on lists of :class:`~fractions.Fraction`.

Thin wrappers around sympy's ``DomainMatrix`` over ``QQ``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _dm(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    data = [[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in r] for r in rows]
    return DomainMatrix(data, (len(data), ncols), QQ)


def _frac(x) -> Fraction:
    return Fraction(int(QQ.numer(x)), int(QQ.denom(x)))


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows:
        return 0
    return _dm(rows, ncols).rank()


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    if not rows:
        return [], ()
    r, piv = _dm(rows, ncols).rref()
    out = [[_frac(x) for x in row] for row in r.to_list()[: len(piv)]]
    return out, tuple(piv)


def solve(columns: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """One solution ``x`` of ``sum_j x_j columns[j] = target``, or ``None``.

    Free variables are set to zero.
    """
    n = len(target)
    k = len(columns)
    rows = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, piv = rref(rows, k + 1)
    if k in piv:
        return None
    x = [Fraction(0)] * k
    for row, p in zip(red, piv):
        x[p] = row[k]
    return x


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = _dm(rows, ncols).nullspace()
    return [[_frac(x) for x in r] for r in ns.to_list()]


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> bool:
    ra, rb = rank(a, ncols), rank(b, ncols)
    return ra == rb == rank(list(a) + list(b), ncols)
