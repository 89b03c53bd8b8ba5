"""Exact integer and rational linear algebra.

Matrices are plain lists of rows holding Python ints (or ``Fraction`` for the
rational helpers). Nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

IntMatrix = list[list[int]]


class DimensionError(ValueError):
    """Raised when matrix and vector shapes do not fit together."""


def shape(M: Sequence[Sequence], ncols: Optional[int] = None) -> tuple[int, int]:
    if not M:
        return 0, (ncols or 0)
    return len(M), len(M[0])


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> IntMatrix:
    return [[0] * n for _ in range(m)]


def transpose(M: Sequence[Sequence], ncols: int = 0) -> list[list]:
    if not M:
        return [[] for _ in range(ncols)]
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if A and B and len(A[0]) != len(B):
        raise DimensionError(f"cannot multiply {len(A)}x{len(A[0])} by {len(B)}x{len(B[0])}")
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(M: Sequence[Sequence], x: Sequence) -> list:
    for row in M:
        if len(row) != len(x):
            raise DimensionError(f"row length {len(row)} does not match vector length {len(x)}")
    return [sum(a * b for a, b in zip(row, x)) for row in M]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionError("determinant needs a square matrix")
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _row_combine(A: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int) -> None:
    # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    ri, rj = A[i], A[j]
    A[i] = [a * x + b * y for x, y in zip(ri, rj)]
    A[j] = [c * x + d * y for x, y in zip(ri, rj)]


def hnf(M: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ M == H``. Pivots of
    successive nonzero rows move strictly right, are positive, and every entry
    above a pivot lies in ``[0, pivot)``.
    """
    H = [list(map(int, row)) for row in M]
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(m)
    r = 0
    for col in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][col] == 0:
                continue
            a, b = H[r][col], H[i][col]
            if a and b % a == 0:
                _row_combine(H, r, i, 1, 0, -(b // a), 1)
                _row_combine(U, r, i, 1, 0, -(b // a), 1)
                continue
            g, x, y = _xgcd(a, b)
            # [[x, y], [-b/g, a/g]] has determinant 1
            _row_combine(H, r, i, x, y, -b // g, a // g)
            _row_combine(U, r, i, x, y, -b // g, a // g)
        if H[r][col] == 0:
            continue
        if H[r][col] < 0:
            H[r] = [-v for v in H[r]]
            U[r] = [-v for v in U[r]]
        p = H[r][col]
        for i in range(r):
            q = H[i][col] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


@dataclass(frozen=True)
class SNFResult:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def elementary_divisors(self) -> list[int]:
        """Nontrivial invariant factors (those > 1) of the cokernel torsion."""
        return [d for d in self.diagonal if d > 1]


def snf(M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> SNFResult:
    """Smith normal form with explicit left and right transforms.

    ``ncols`` is only needed when ``M`` has no rows.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = identity(m)
    Vt = identity(n)  # kept transposed so column ops become row ops

    def col_swap(j: int, k: int) -> None:
        for row in A:
            row[j], row[k] = row[k], row[j]
        Vt[j], Vt[k] = Vt[k], Vt[j]

    def col_combine(j: int, k: int, a: int, b: int, c: int, d: int) -> None:
        for row in A:
            x, y = row[j], row[k]
            row[j], row[k] = a * x + b * y, c * x + d * y
        _row_combine(Vt, j, k, a, b, c, d)

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        if i0 != t:
            A[t], A[i0] = A[i0], A[t]
            U[t], U[i0] = U[i0], U[t]
        if j0 != t:
            col_swap(t, j0)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    a, b = A[t][t], A[i][t]
                    if b % a == 0:
                        _row_combine(A, t, i, 1, 0, -(b // a), 1)
                        _row_combine(U, t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        _row_combine(A, t, i, x, y, -b // g, a // g)
                        _row_combine(U, t, i, x, y, -b // g, a // g)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    a, b = A[t][t], A[t][j]
                    if b % a == 0:
                        col_combine(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        col_combine(t, j, x, y, -b // g, a // g)
                        changed = True
            if changed:
                continue
            p = A[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            # fold the offending row into the pivot row and restart
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return SNFResult(U=U, D=A, V=transpose(Vt, n) if n else [])


def inverse_unimodular(M: Sequence[Sequence[int]]) -> IntMatrix:
    inv = rational_inverse(M)
    if inv is None:
        raise ValueError("matrix is singular")
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def solve_integer_linear(M: Sequence[Sequence[int]], b: Sequence[int],
                         ncols: Optional[int] = None) -> Optional[list[int]]:
    """Return an integer ``x`` with ``M @ x == b``, or ``None`` if none exists."""
    m = len(M)
    if len(b) != m:
        raise DimensionError(f"matrix has {m} rows but right-hand side has length {len(b)}")
    n = len(M[0]) if m else (ncols or 0)
    if m == 0:
        return [0] * n
    res = snf(M)
    c = matvec(res.U, [int(v) for v in b])
    y = [0] * n
    for i in range(m):
        d = res.D[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    return matvec(res.V, y)


def integer_kernel(M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list[list[int]]:
    """Saturated basis of ``{x in Z^n : M x = 0}``, reduced to Hermite form."""
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    if m == 0:
        return identity(n)
    res = snf(M)
    r = res.rank
    basis = [[res.V[i][j] for i in range(n)] for j in range(r, n)]
    if not basis:
        return []
    H, _ = hnf(basis)
    return [row for row in H if any(row)]


# -- rational helpers ---------------------------------------------------------


def _as_fraction_matrix(M: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in M]


def rref(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    A = _as_fraction_matrix(M)
    m = len(A)
    n = len(A[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][col]
        A[r] = [x / p for x in A[r]]
        for i in range(m):
            if i != r and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def rational_solve(M: Sequence[Sequence], b: Sequence,
                   ncols: Optional[int] = None) -> Optional[list[Fraction]]:
    """One rational solution of ``M x = b`` by Gauss-Jordan elimination, or ``None``.

    Free variables are set to zero.
    """
    m = len(M)
    if len(b) != m:
        raise DimensionError(f"matrix has {m} rows but right-hand side has length {len(b)}")
    n = len(M[0]) if m else (ncols or 0)
    if m == 0:
        return [Fraction(0)] * n
    aug = [list(row) + [rhs] for row, rhs in zip(M, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = R[i][n]
    return x


def rational_inverse(M: Sequence[Sequence]) -> Optional[list[list[Fraction]]]:
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in R]


def in_row_span(rows: Sequence[Sequence], v: Sequence) -> bool:
    """Whether ``v`` is a rational combination of ``rows``."""
    if not any(v):
        return True
    if not rows:
        return False
    return rank(list(rows) + [list(v)]) == rank(rows)


def primitive(v: Sequence[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g else list(v)
