"""Exact Gauss-Jordan elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def solve_exact(A: Sequence[Sequence[int | Fraction]], b: Sequence[int | Fraction]) -> list[Fraction]:
    """Solve the square system ``A x = b`` exactly.

    Raises ``ValueError`` if ``A`` is singular.
    """
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("solve_exact needs a square system")
    M = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        M[col], M[pivot] = M[pivot], M[col]
        p = M[col][col]
        if p != 1:
            M[col] = [v / p for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]
