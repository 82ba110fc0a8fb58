"""Gaussian elimination over exact fields (Fraction or ExactComplex entries)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rref(matrix: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns.  Input is not modified."""
    m = [list(row) for row in matrix]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if isinstance(m[r][c], Fraction) else m[r][c] ** -1
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(matrix: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of the right null space, one vector per free column (free entry = 1)."""
    if not matrix:
        return [[Fraction(int(i == k)) for i in range(ncols)] for k in range(ncols)]
    red, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


class SingularMatrixError(ArithmeticError):
    pass


def solve(A: Sequence[Sequence], b: Sequence) -> list:
    """Exact solution of a square nonsingular system."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [red[i][n] for i in range(n)]
