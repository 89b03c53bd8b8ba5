"""Orlik-Solomon algebra in degrees 0-2 and Aomoto complex cohomology.

The projective complement is identified with the affine complement of the
decone at the last line. Its OS algebra has one degree-1 generator per
remaining line; in degree 2 the basis at an affine point with lines
``i_1 < ... < i_m`` is ``e_{i_1} e_{i_k}`` (``k = 2..m``). Lines meeting on
the removed line are parallel in the decone and multiply to zero.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arrangement import Arrangement, incidence, vector_line_exponents
from .exact_linalg import rank
from .torus import AdmissibilityVerdict, TorusPoint, is_admissible


@dataclass(frozen=True)
class OSStructure:
    """Degree <= 2 OS algebra of a decone.

    ``table[(i, j)]`` (``i < j`` generator indices) maps basis positions of
    ``deg2_basis`` to coefficients of ``e_i e_j``.
    """

    b1: int
    deg2_basis: tuple[tuple[int, tuple[int, int]], ...]
    table: dict
    point_lines: tuple[tuple[int, ...], ...]  # affine points, generator indices

    @property
    def b2(self) -> int:
        return len(self.deg2_basis)

    def product(self, i: int, j: int) -> dict[int, int]:
        if i == j:
            return {}
        if i < j:
            return self.table[(i, j)]
        return {k: -v for k, v in self.table[(j, i)].items()}

    def euler_characteristic(self) -> int:
        return 1 - self.b1 + self.b2


def os_structure(A: Arrangement) -> OSStructure:
    N = len(A)
    last = A.labels[-1]
    b1 = N - 1
    affine = []
    for p in incidence(A):
        if last in p.incident_labels:
            continue
        affine.append(tuple(A.index(x) for x in p.incident_labels))
    basis = []
    where: dict[tuple[int, int], int] = {}
    for k, lines in enumerate(affine):
        for j in lines[1:]:
            where[(lines[0], j)] = len(basis)
            basis.append((k, (lines[0], j)))
    table: dict[tuple[int, int], dict[int, int]] = {}
    for i, j in itertools.combinations(range(b1), 2):
        table[(i, j)] = {}
    for lines in affine:
        i1 = lines[0]
        for i, j in itertools.combinations(lines, 2):
            if i == i1:
                table[(i, j)] = {where[(i, j)]: 1}
            else:
                # e_i e_j = e_{i1} e_j - e_{i1} e_i
                table[(i, j)] = {where[(i1, j)]: 1, where[(i1, i)]: -1}
    return OSStructure(b1, tuple(basis), table, tuple(affine))


@dataclass(frozen=True)
class AomotoClass:
    """``sum a_j dlog f_j`` with ``sum a_j == 0``; optional imaginary parts."""

    a: tuple[Fraction, ...]
    imag: tuple[Fraction, ...] = ()

    def __post_init__(self):
        a = tuple(Fraction(x) for x in self.a)
        im = tuple(Fraction(x) for x in self.imag) if self.imag else (Fraction(0),) * len(a)
        if len(im) != len(a):
            raise ValueError("real and imaginary parts differ in length")
        if sum(a) != 0 or sum(im) != 0:
            raise ValueError(f"class coefficients must sum to zero, got {sum(a)} + {sum(im)}i")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "imag", im)

    @property
    def is_zero(self) -> bool:
        return not any(self.a) and not any(self.imag)

    def scaled(self, s: Fraction) -> "AomotoClass":
        s = Fraction(s)
        return AomotoClass(tuple(s * x for x in self.a), tuple(s * x for x in self.imag))


def multiplication_matrix(os: OSStructure, coeffs: Sequence[Fraction]) -> list[list[Fraction]]:
    """Matrix of ``x -> alpha * x`` from degree 1 to degree 2 (``b2 x b1``)."""
    M = [[Fraction(0)] * os.b1 for _ in range(os.b2)]
    for j in range(os.b1):
        for i in range(os.b1):
            if not coeffs[i]:
                continue
            for k, v in os.product(i, j).items():
                M[k][j] += coeffs[i] * v
    return M


def _complex_rank(re: list[list[Fraction]], im: list[list[Fraction]]) -> int:
    if not any(any(row) for row in im):
        return rank(re)
    # rank over C of re + i*im is half the real rank of [[re, -im], [im, re]]
    top = [r + [-x for x in s] for r, s in zip(re, im)]
    bottom = [s + r for r, s in zip(re, im)]
    return rank(top + bottom) // 2


def aomoto_ranks(A: Arrangement, alpha: AomotoClass, os: Optional[OSStructure] = None) -> dict:
    """``dim H^1`` of the Aomoto complex and the rank of ``alpha`` acting on degree 1."""
    if os is None:
        os = os_structure(A)
    if len(alpha.a) != len(A):
        raise ValueError(f"class has {len(alpha.a)} coefficients for {len(A)} lines")
    # decone: the last line's coefficient is absorbed by sum-zero
    re = multiplication_matrix(os, alpha.a[:-1])
    im = multiplication_matrix(os, alpha.imag[:-1])
    r1 = _complex_rank(re, im) if os.b2 else 0
    r0 = 0 if alpha.is_zero else 1
    return {"h1": os.b1 - r1 - r0, "rank_degree1": r1, "rank_degree0": r0}


def aomoto_h1(A: Arrangement, alpha: AomotoClass, os: Optional[OSStructure] = None) -> int:
    return aomoto_ranks(A, alpha, os)["h1"]


def cohomology_report(A: Arrangement, t: TorusPoint, setup=None,
                      verdict: Optional[AdmissibilityVerdict] = None) -> dict:
    """Betti numbers of the local system at ``t`` when ``t`` is admissible."""
    from .arrangement import build_setup

    if verdict is None:
        verdict = is_admissible(t, setup or build_setup(A))
    if not verdict.admissible:
        return {"status": "refused: non-admissible", "betti": None}
    a = vector_line_exponents(verdict.witness)
    im = vector_line_exponents(t.imag)
    alpha = AomotoClass(tuple(a), tuple(im))
    os = os_structure(A)
    ranks = aomoto_ranks(A, alpha, os)
    b0 = 1 if alpha.is_zero else 0
    b1 = ranks["h1"]
    b2 = os.euler_characteristic() - b0 + b1
    return {"status": "admissible", "betti": (b0, b1, b2), "alpha": alpha}


def random_class(n_lines: int, rng: random.Random, bound: int = 1000) -> AomotoClass:
    a = [Fraction(rng.randint(-bound, bound)) for _ in range(n_lines - 1)]
    return AomotoClass(tuple(a + [-sum(a)]))
