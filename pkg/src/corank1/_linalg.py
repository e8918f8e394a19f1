"""Small dense linear algebra over Fraction (exact) with float fallback.

Matrices are tuples of row tuples.  Exact routines never threshold; when a
matrix contains floats, pivots smaller than ``FLOAT_TOL`` are treated as zero.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

FLOAT_TOL = 1e-12

Matrix = tuple[tuple, ...]


class SingularMatrix(ValueError):
    pass


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def is_exact_matrix(rows) -> bool:
    return all(_is_exact(v) for row in rows for v in row)


def as_matrix(rows) -> Matrix:
    out = []
    for row in rows:
        out.append(tuple(Fraction(v) if isinstance(v, int) and not isinstance(v, bool) else v for v in row))
    return tuple(out)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(n: int, m: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def transpose(a) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a, b) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a, v) -> tuple:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def block_diag(*blocks) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return tuple(tuple(r) for r in out)


def _nonzero(v) -> bool:
    return v != 0 if _is_exact(v) else abs(v) > FLOAT_TOL


def rref(rows) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in as_matrix(rows)]
    if not m:
        return (), []
    nrows, ncols = len(m), len(m[0])
    exact = is_exact_matrix(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        if exact:
            piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        else:
            cand = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            piv = cand if abs(m[cand][c]) > FLOAT_TOL else None
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(nrows):
            if i != r and _nonzero(m[i][c]):
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in m), pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def det(rows):
    m = [list(r) for r in as_matrix(rows)]
    n = len(m)
    if n == 0:
        return Fraction(1)
    if not is_exact_matrix(m):
        return float(np.linalg.det(np.array(m, dtype=float)))
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        result *= p
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / p
                m[i] = [vi - f * vc for vi, vc in zip(m[i], m[c])]
    return sign * result


def inverse(rows) -> Matrix:
    a = as_matrix(rows)
    n = len(a)
    if not is_exact_matrix(a):
        arr = np.array(a, dtype=float)
        if abs(np.linalg.det(arr)) < FLOAT_TOL:
            raise SingularMatrix("matrix is singular")
        return tuple(tuple(float(v) for v in row) for row in np.linalg.inv(arr))
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def nullspace(rows, ncols: int | None = None) -> list[tuple]:
    """Basis of the right nullspace, one vector per free column."""
    a = as_matrix(rows)
    if not a:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    n = len(a[0])
    red, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -red[r][f]
        basis.append(tuple(v))
    return basis


def solve(a, b) -> tuple:
    """Solve a x = b for square invertible a."""
    inv = inverse(a)
    return matvec(inv, b)


def to_numpy(rows) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in rows], dtype=float)


def exact_sqrt(q: Fraction):
    """Exact square root of a non-negative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    from math import isqrt

    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def dot(u: Sequence, v: Sequence):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def gram_schmidt(vectors: Sequence[Sequence], exact_ok: bool = True):
    """Orthonormalize ``vectors`` (assumed independent).

    Returns (basis, exact) where exact is True when every norm was a perfect
    rational square so the basis stayed in Fraction arithmetic.
    """
    ortho = []
    for v in vectors:
        w = list(v)
        for u in ortho:
            k = dot(w, u) / dot(u, u)
            w = [wi - k * ui for wi, ui in zip(w, u)]
        ortho.append(w)
    roots = [exact_sqrt(dot(w, w)) if exact_ok and is_exact_matrix([w]) else None for w in ortho]
    if all(r is not None for r in roots):
        return [tuple(wi / r for wi in w) for w, r in zip(ortho, roots)], True
    out = []
    for w in ortho:
        nrm = float(np.sqrt(float(dot(w, w))))
        out.append(tuple(float(wi) / nrm for wi in w))
    return out, False


def combination(rows, target) -> tuple:
    """Coefficients c with sum_i c_i rows[i] = target (rows independent)."""
    aug = [tuple(col) + (t,) for col, t in zip(transpose(rows), target)]
    red, piv = rref(aug)
    n = len(rows)
    if n in piv:
        raise ValueError("target is not in the row span")
    c = [Fraction(0)] * n
    for r, pc in enumerate(piv):
        c[pc] = red[r][n]
    return tuple(c)
