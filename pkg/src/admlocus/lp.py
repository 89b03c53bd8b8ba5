"""Exact rational feasibility: Fourier-Motzkin elimination and Bland simplex.

Both routes answer the same question, find ``x >= 0`` with ``A x = b``, and
are kept independent so one can audit the other.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .exact_linalg import DimensionError, rref

FM_MAX_VARIABLES = 12

Vector = list[Fraction]


def _check(A: Sequence[Sequence], b: Sequence, nvars: Optional[int]) -> int:
    if len(A) != len(b):
        raise DimensionError(f"{len(A)} equations but {len(b)} right-hand sides")
    n = len(A[0]) if A else (nvars or 0)
    if any(len(row) != n for row in A):
        raise DimensionError("ragged constraint matrix")
    return n


def nonneg_solution(A: Sequence[Sequence], b: Sequence, nvars: Optional[int] = None,
                    method: str = "auto") -> Optional[Vector]:
    """Some ``x >= 0`` with ``A x = b``, or ``None`` when infeasible.

    ``method`` is ``"fm"``, ``"simplex"`` or ``"auto"`` (FM up to
    ``FM_MAX_VARIABLES`` unknowns, simplex beyond).
    """
    n = _check(A, b, nvars)
    if method == "auto":
        method = "fm" if n <= FM_MAX_VARIABLES else "simplex"
    if method == "fm":
        return fourier_motzkin(A, b, n)
    if method == "simplex":
        res = simplex(A, b, None, n)
        return None if res is None else res[0]
    raise ValueError(f"unknown method {method!r}")


# -- Fourier-Motzkin -----------------------------------------------------------

# An inequality is (coeffs, const) meaning sum(coeffs[i] * y_i) <= const.
Ineq = tuple[tuple[Fraction, ...], Fraction]


def _normalize(ineq: Ineq) -> Ineq:
    coeffs, const = ineq
    scale = next((abs(c) for c in coeffs if c), None)
    if scale is None:
        return coeffs, const
    return tuple(c / scale for c in coeffs), const / scale


def _eliminate(system: list[Ineq], k: int) -> list[Ineq]:
    pos, neg, out = [], [], set()
    for coeffs, const in system:
        if coeffs[k] > 0:
            pos.append((coeffs, const))
        elif coeffs[k] < 0:
            neg.append((coeffs, const))
        else:
            out.add((coeffs, const))
    for pc, pk in pos:
        for nc, nk in neg:
            a, b = pc[k], -nc[k]
            coeffs = tuple(b * x + a * y for x, y in zip(pc, nc))
            out.add(_normalize((coeffs, b * pk + a * nk)))
    return sorted(out)


def fourier_motzkin(A: Sequence[Sequence], b: Sequence, nvars: Optional[int] = None) -> Optional[Vector]:
    n = _check(A, b, nvars)
    if not A:
        return [Fraction(0)] * n
    R, pivots = rref([list(row) + [rhs] for row, rhs in zip(A, b)])
    if n in pivots:
        return None
    free = [j for j in range(n) if j not in pivots]
    q = len(free)
    # x_p = R[i][n] - sum_f R[i][f] x_f >= 0  and  x_f >= 0, in the free unknowns
    system: list[Ineq] = []
    for i, p in enumerate(pivots):
        system.append(_normalize((tuple(R[i][f] for f in free), R[i][n])))
    for k in range(q):
        system.append((tuple(Fraction(-int(k == j)) for j in range(q)), Fraction(0)))
    stages = [sorted(set(system))]
    for k in range(q):
        stages.append(_eliminate(stages[-1], k))
    for coeffs, const in stages[-1]:
        if const < 0:
            return None
    y = [Fraction(0)] * q
    for k in reversed(range(q)):
        lo, hi = None, None
        for coeffs, const in stages[k]:
            c = coeffs[k]
            if not c:
                continue
            rest = const - sum(coeffs[j] * y[j] for j in range(k + 1, q))
            bound = rest / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        val = Fraction(0)
        if lo is not None and val < lo:
            val = lo
        if hi is not None and val > hi:
            val = hi
        y[k] = val
    x = [Fraction(0)] * n
    for j, f in enumerate(free):
        x[f] = y[j]
    for i, p in enumerate(pivots):
        x[p] = R[i][n] - sum(R[i][f] * y[j] for j, f in enumerate(free))
    return x


# -- simplex -------------------------------------------------------------------


def simplex(A: Sequence[Sequence], b: Sequence, cost: Optional[Sequence] = None,
            nvars: Optional[int] = None) -> Optional[tuple[Vector, Optional[Fraction]]]:
    """Two-phase tableau simplex with Bland's rule, exact over Q.

    Minimizes ``cost . x`` subject to ``A x = b, x >= 0``. Returns ``None`` when
    infeasible, otherwise ``(x, value)``; ``value`` is ``None`` if the objective
    is unbounded below (``x`` is then merely feasible).
    """
    n = _check(A, b, nvars)
    m = len(A)
    rows = []
    for k, (row, rhs) in enumerate(zip(A, b)):
        row = [Fraction(v) for v in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append(row + [Fraction(int(i == k)) for i in range(m)] + [rhs])
    width = n + m
    basis = [n + i for i in range(m)]

    def pivot(r: int, c: int) -> None:
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[r])]
        basis[r] = c

    def run(obj: list[Fraction], allowed: int) -> bool:
        # returns False if unbounded
        while True:
            reduced = [obj[j] - sum(obj[basis[i]] * rows[i][j] for i in range(m))
                       for j in range(allowed)]
            enter = next((j for j in range(allowed) if reduced[j] < 0 and j not in basis), None)
            if enter is None:
                return True
            best = None
            for i in range(m):
                a = rows[i][enter]
                if a > 0:
                    key = (rows[i][width] / a, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            pivot(best[1], enter)

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, width)
    if any(basis[i] >= n and rows[i][width] != 0 for i in range(m)):
        return None
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            c = next((j for j in range(n) if rows[i][j] != 0), None)
            if c is not None:
                pivot(i, c)
    keep = [i for i in range(m) if basis[i] < n]
    rows = [rows[i] for i in keep]
    basis = [basis[i] for i in keep]
    m = len(rows)

    def solution() -> Vector:
        x = [Fraction(0)] * n
        for i in range(m):
            x[basis[i]] = rows[i][width]
        return x

    if cost is None:
        return solution(), Fraction(0)
    obj = [Fraction(c) for c in cost]
    bounded = run(obj, n)
    x = solution()
    if not bounded:
        return x, None
    return x, sum(c * v for c, v in zip(obj, x))


def feasible_point(G: Sequence[Sequence], h: Sequence, E: Sequence[Sequence] = (),
                   e: Sequence = (), nvars: Optional[int] = None) -> Optional[Vector]:
    """A rational ``v`` with ``G v <= h`` and ``E v = e`` (free sign), or ``None``."""
    n = len(G[0]) if G else (len(E[0]) if E else (nvars or 0))
    k = len(G)
    A, rhs = [], []
    for i, row in enumerate(G):
        A.append(list(row) + [-v for v in row] + [int(i == j) for j in range(k)])
        rhs.append(h[i])
    for row, val in zip(E, e):
        A.append(list(row) + [-v for v in row] + [0] * k)
        rhs.append(val)
    res = nonneg_solution(A, rhs, 2 * n + k, method="simplex")
    if res is None:
        return None
    return [res[j] - res[n + j] for j in range(n)]
