"""Admissibility of points of an algebraic torus relative to a finite set of forms.

Points are handled through exponent vectors: a point ``t`` is ``Exp(v0)`` with
``v0 = re + i*im`` rational in the lattice basis, ``Exp`` being ``exp(2 pi i .)``
coordinatewise. A form ``a`` has ``a~(t) == 1`` exactly when ``a(re)`` is an
integer and ``a(im) == 0``.

The decision procedure: with ``S = Phi_t`` and ``S=`` its implicit equalities,
``t`` is admissible iff the coset ``re + Z^n`` meets the null space of ``S=``.
That null space is the linear span of the cone ``D(S)``; the cone is
full-dimensional inside it and the lattice is full rank there, so meeting the
span is the same as meeting the cone. For complex points the imaginary part is
killed by every form of ``Phi_t`` and plays no role.
"""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, lcm
from typing import Iterable, Optional, Sequence

from .cones import (
    FormSet,
    FormVector,
    d0_subspace,
    implicit_equalities,
    relative_interior_point,
)
from .exact_linalg import (
    SNFResult,
    in_row_span,
    inverse_unimodular,
    matvec,
    rank,
    rational_solve,
    snf,
    solve_integer_linear,
    transpose,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 ** 20
GENERIC_SAMPLES = 32


class PointError(ValueError):
    """A point violates the precondition of an operation."""


class EnumerationBudgetExceeded(RuntimeError):
    pass


def _frac_tuple(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


def _mod1(x: Fraction) -> Fraction:
    return x - floor(x)


@dataclass(frozen=True)
class CharacterSetup:
    """Rank of the exponent lattice and the form set ``Phi``.

    ``coordinate_labels`` names forms that essential-only enumeration never
    uses as candidates (the per-line forms in the arrangement case).
    """

    rank: int
    phi: FormSet
    basis_note: str = "standard basis of Z^n"
    coordinate_labels: frozenset = frozenset()

    def __post_init__(self):
        if self.phi.ambient_rank != self.rank:
            raise ValueError(f"forms have rank {self.phi.ambient_rank}, setup has rank {self.rank}")
        for f in self.phi:
            if f.is_zero:
                raise ValueError(f"zero form {f.label} is not allowed in Phi")


@dataclass(frozen=True)
class TorusPoint:
    """``Exp(real + i*imag)``, real parts kept reduced into ``[0, 1)``."""

    real: tuple[Fraction, ...]
    imag: tuple[Fraction, ...] = ()

    def __post_init__(self):
        real = tuple(_mod1(Fraction(x)) for x in self.real)
        imag = _frac_tuple(self.imag) if self.imag else (Fraction(0),) * len(real)
        if len(imag) != len(real):
            raise ValueError("real and imaginary exponent vectors differ in length")
        object.__setattr__(self, "real", real)
        object.__setattr__(self, "imag", imag)

    @classmethod
    def unit(cls, n: int) -> "TorusPoint":
        return cls((Fraction(0),) * n)

    @property
    def rank(self) -> int:
        return len(self.real)

    @property
    def is_torsion(self) -> bool:
        return not any(self.imag)

    @property
    def is_unit(self) -> bool:
        return self.is_torsion and not any(self.real)

    @property
    def order(self) -> Optional[int]:
        if not self.is_torsion:
            return None
        return lcm(1, *(x.denominator for x in self.real))

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(a + b for a, b in zip(self.real, other.real)),
                          tuple(a + b for a, b in zip(self.imag, other.imag)))

    def __pow__(self, k: int) -> "TorusPoint":
        return TorusPoint(tuple(k * a for a in self.real), tuple(k * a for a in self.imag))

    def inverse(self) -> "TorusPoint":
        return self ** -1

    def shifted(self, direction: Sequence, scale=1) -> "TorusPoint":
        return TorusPoint(tuple(a + Fraction(scale) * d for a, d in zip(self.real, direction)), self.imag)


def render_root_of_unity(x: Fraction) -> str:
    """Human form of ``Exp(x)`` for rational ``x``, e.g. ``zeta_9^4``."""
    x = _mod1(Fraction(x))
    if x == 0:
        return "1"
    if x == Fraction(1, 2):
        return "-1"
    if x.numerator == 1:
        return f"zeta_{x.denominator}"
    return f"zeta_{x.denominator}^{x.numerator}"


def canonicalize(raw_exponents: Sequence, setup=None, imag: Optional[Sequence] = None) -> TorusPoint:
    """Reduce an exponent vector to its canonical ``TorusPoint``.

    ``setup`` (a ``CharacterSetup`` or an int rank) is only used for the length check.
    """
    n = setup.rank if isinstance(setup, CharacterSetup) else setup
    if n is not None and len(raw_exponents) != n:
        raise PointError(f"expected {n} exponents, got {len(raw_exponents)}")
    return TorusPoint(_frac_tuple(raw_exponents), _frac_tuple(imag) if imag else ())


def character_is_one(form: FormVector, t: TorusPoint) -> bool:
    return form(t.real).denominator == 1 and form(t.imag) == 0


def phi_at(t: TorusPoint, setup: CharacterSetup) -> FormSet:
    """``Phi_t``: the forms whose character is trivial at ``t``."""
    if t.rank != setup.rank:
        raise PointError(f"point has rank {t.rank}, setup has rank {setup.rank}")
    return FormSet(tuple(a for a in setup.phi if character_is_one(a, t)), setup.rank)


# -- subtori -------------------------------------------------------------------


@dataclass(frozen=True)
class SubtorusDescription:
    """``T(S)``: dimension, component group ``C(S)`` and torsion coset reps.

    Components are indexed by tuples ``k`` with ``0 <= k[j] < component_group[j]``
    in lexicographic order; the all-zero index is the identity component.
    """

    forms: FormSet
    dimension: int
    component_group: tuple[int, ...]
    component_reps: tuple[TorusPoint, ...]
    identity_tangent: tuple[tuple[int, ...], ...]
    smith: SNFResult = field(repr=False, compare=False)
    _positions: tuple[int, ...] = field(repr=False, compare=False, default=())
    _vinv: tuple = field(repr=False, compare=False, default=())

    @property
    def order(self) -> int:
        out = 1
        for d in self.component_group:
            out *= d
        return out

    @property
    def rank(self) -> int:
        return self.forms.ambient_rank

    def component_indices(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(d) for d in self.component_group)))

    def rep(self, u: Sequence[int]) -> TorusPoint:
        return self.component_reps[self.component_indices().index(tuple(u))]

    def contains(self, t: TorusPoint) -> bool:
        return all(character_is_one(a, t) for a in self.forms)

    def component_of(self, t: TorusPoint) -> tuple[int, ...]:
        if not self.contains(t):
            raise PointError("point does not lie on the subtorus")
        w = matvec(self._vinv, t.real)
        out = []
        for pos, d in zip(self._positions, self.component_group):
            k = d * w[pos]
            assert k.denominator == 1
            out.append(int(k) % d)
        return tuple(out)


def subtorus(S: FormSet, setup: Optional[CharacterSetup] = None) -> SubtorusDescription:
    """Describe ``T(S)`` through the Smith form of the coefficient matrix of ``S``."""
    n = S.ambient_rank
    if setup is not None and setup.rank != n:
        raise ValueError("form set and setup disagree on rank")
    res = snf(S.matrix(), ncols=n)
    diag = res.diagonal
    r = res.rank
    positions = tuple(i for i in range(r) if diag[i] > 1)
    divisors = tuple(diag[i] for i in positions)
    reps = []
    for k in itertools.product(*(range(d) for d in divisors)):
        w = [Fraction(0)] * n
        for pos, d, kk in zip(positions, divisors, k):
            w[pos] = Fraction(kk, d)
        reps.append(TorusPoint(tuple(matvec(res.V, w))))
    tangent = tuple(tuple(v) for v in d0_subspace(S))
    return SubtorusDescription(
        forms=S,
        dimension=n - r,
        component_group=divisors,
        component_reps=tuple(reps),
        identity_tangent=tangent,
        smith=res,
        _positions=positions,
        _vinv=tuple(tuple(row) for row in inverse_unimodular(res.V)) if n else (),
    )


def _integral_values(S: FormSet, t: TorusPoint) -> list[int]:
    out = []
    for a in S:
        val = a(t.real)
        if val.denominator != 1 or a(t.imag) != 0:
            raise PointError(f"character of form {a.label} is not trivial at the point")
        out.append(int(val))
    return out


def in_identity_component(t: TorusPoint, S: FormSet) -> bool:
    """Whether ``t`` lies on the identity component of ``T(S)``."""
    values = _integral_values(S, t)
    if not len(S):
        return True
    return solve_integer_linear(S.matrix(), [-v for v in values]) is not None


# -- admissibility -------------------------------------------------------------


@dataclass(frozen=True)
class Obstruction:
    """Integer system ``matrix @ lam == rhs`` that has no solution."""

    implicit_forms: FormSet
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]

    def recheck(self) -> bool:
        return solve_integer_linear([list(r) for r in self.matrix], list(self.rhs),
                                    ncols=self.implicit_forms.ambient_rank) is None


ADMISSIBLE = "admissible"
NON_ADMISSIBLE = "non_admissible"


@dataclass(frozen=True)
class AdmissibilityVerdict:
    status: str
    point: TorusPoint
    phi_t: FormSet
    implicit_forms: FormSet
    witness: Optional[tuple[Fraction, ...]] = None  # real part; imaginary part is point.imag
    obstruction: Optional[Obstruction] = None

    @property
    def admissible(self) -> bool:
        return self.status == ADMISSIBLE


def verify_witness(setup: CharacterSetup, t: TorusPoint, witness: Sequence[Fraction]) -> bool:
    """Check the defining condition literally: ``Exp(v) == t`` and no ``a(v)`` is a positive integer."""
    if len(witness) != setup.rank:
        return False
    if any((Fraction(w) - r).denominator != 1 for w, r in zip(witness, t.real)):
        return False
    for a in setup.phi:
        if a(t.imag) != 0:
            continue
        val = a(witness)
        if val.denominator == 1 and val > 0:
            return False
    return True


def _lift_into_cone(S: FormSet, implicit: FormSet, v1: list[Fraction]) -> list[Fraction]:
    """Move ``v1`` (on the span of ``D(S)``) by a lattice vector of that span into ``D(S)``."""
    if all(a(v1) <= 0 for a in S):
        return v1
    w = relative_interior_point(S, implicit)
    K = d0_subspace(implicit)
    coords = rational_solve(transpose(K), w)
    assert coords is not None
    scale = 1
    while True:
        step = [round(scale * c) for c in coords]
        v = [x + sum(s * k[i] for s, k in zip(step, K)) for i, x in enumerate(v1)]
        if all(a(v) <= 0 for a in S):
            return v
        scale *= 2


def is_admissible(t: TorusPoint, setup: CharacterSetup) -> AdmissibilityVerdict:
    """Decide admissibility of ``t`` and return a checkable certificate."""
    S = phi_at(t, setup)
    implicit = implicit_equalities(S) if len(S) else S
    re = list(t.real)
    if len(implicit):
        M = implicit.matrix()
        rhs = [-int(a(re)) for a in implicit]
        lam = solve_integer_linear(M, rhs)
        if lam is None:
            return AdmissibilityVerdict(
                NON_ADMISSIBLE, t, S, implicit,
                obstruction=Obstruction(implicit, tuple(map(tuple, M)), tuple(rhs)),
            )
        v1 = [x + l for x, l in zip(re, lam)]
    else:
        v1 = re
    v = _lift_into_cone(S, implicit, v1)
    witness = tuple(Fraction(x) for x in v)
    assert verify_witness(setup, t, witness)
    return AdmissibilityVerdict(ADMISSIBLE, t, S, implicit, witness=witness)


# -- strata --------------------------------------------------------------------


def stratum_is_empty(sub: SubtorusDescription, u: Sequence[int], setup: CharacterSetup) -> bool:
    """``T(S)°_u`` is empty iff some other form is constant 1 on ``T(S)_u``.

    A form outside the rational span of ``S`` is a nonconstant character on the
    irreducible component and cannot cover it; a form inside the span is
    constant there, equal to its value at the coset representative.
    """
    rep = sub.rep(u)
    rows = sub.forms.matrix()
    for a in setup.phi:
        if a.label in sub.forms.labels:
            continue
        if a(rep.real).denominator == 1 and in_row_span(rows, a.coeffs):
            return True
    return False


def _primes(start: int = 7):
    p = start
    while True:
        if all(p % q for q in range(2, int(p ** 0.5) + 1)):
            yield p
        p += 1


def generic_representative(S: FormSet, u: Sequence[int], setup: CharacterSetup,
                           attempt: int = 0,
                           sub: Optional[SubtorusDescription] = None) -> Optional[TorusPoint]:
    """A torsion point with ``Phi_t == S`` on component ``u`` of ``T(S)``, or ``None``.

    Different ``attempt`` values start from different primes, giving
    independent representatives of the same stratum.
    """
    if sub is None:
        sub = subtorus(S, setup)
    u = tuple(u)
    if stratum_is_empty(sub, u, setup):
        return None
    rep = sub.rep(u)
    K = sub.identity_tangent
    target = set(S.labels)
    if not K:
        assert set(phi_at(rep, setup).labels) == target
        return rep
    # Sample c in (1/p) Z^k for primes p not dividing |C(S)|. A form outside S
    # is trivial on at most a 1/p fraction of those samples, so this ends.
    primes = _primes()
    for _ in range(attempt):
        next(primes)
    for p in primes:
        if sub.order % p == 0:
            continue
        rng = random.Random(f"{attempt}:{p}")
        for _ in range(GENERIC_SAMPLES):
            c = [Fraction(rng.randrange(p), p) for _ in K]
            direction = [sum(cj * k[i] for cj, k in zip(c, K)) for i in range(sub.rank)]
            t = rep.shifted(direction)
            if set(phi_at(t, setup).labels) == target:
                return t


@dataclass(frozen=True)
class TranslatedSubtorus:
    """One connected component ``T(S)_u`` of a subtorus."""

    subtorus: SubtorusDescription
    component: tuple[int, ...]

    @property
    def forms(self) -> FormSet:
        return self.subtorus.forms

    @property
    def dimension(self) -> int:
        return self.subtorus.dimension

    @property
    def translation(self) -> TorusPoint:
        return self.subtorus.rep(self.component)

    @property
    def tangent(self) -> tuple[tuple[int, ...], ...]:
        return self.subtorus.identity_tangent

    def contains(self, t: TorusPoint) -> bool:
        return self.subtorus.contains(t) and self.subtorus.component_of(t) == self.component

    def is_contained_in(self, other: "TranslatedSubtorus") -> bool:
        rows = self.forms.matrix()
        if not all(in_row_span(rows, a.coeffs) for a in other.forms):
            return False
        return other.contains(self.translation)

    def sort_key(self):
        return (-self.dimension, self.forms.labels, self.component)


def _nonadmissible_strata(setup: CharacterSetup, S: FormSet) -> list[TranslatedSubtorus]:
    if rank(S.matrix()) == len(S):
        return []  # independent forms: D(S) is full-dimensional
    sub = subtorus(S, setup)
    live = [u for u in sub.component_indices() if not stratum_is_empty(sub, u, setup)]
    if not live:
        return []
    if not len(implicit_equalities(S)):
        return []
    out = []
    for u in live:
        t = generic_representative(S, u, setup, sub=sub)
        if not is_admissible(t, setup).admissible:
            out.append(TranslatedSubtorus(sub, u))
    return out


def _worker(args):
    setup, chunk = args
    found = []
    for labels in chunk:
        found.extend(_nonadmissible_strata(setup, setup.phi.subset(labels)))
    return found


def candidate_forms(setup: CharacterSetup, essential_only: bool = False,
                    restrict_forms: Optional[FormSet] = None) -> FormSet:
    cands = setup.phi if restrict_forms is None else setup.phi.subset(restrict_forms.labels)
    if essential_only:
        cands = cands.without(setup.coordinate_labels)
    return cands


def enumerate_nonadm(setup: CharacterSetup, essential_only: bool = False,
                     restrict_forms: Optional[FormSet] = None,
                     budget: int = DEFAULT_BUDGET, jobs: int = 1) -> list[TranslatedSubtorus]:
    """Maximal non-admissible translated subtori, sorted by (dimension desc, labels)."""
    cands = candidate_forms(setup, essential_only, restrict_forms)
    k = len(cands)
    if 2 ** k > budget:
        raise EnumerationBudgetExceeded(
            f"{k} candidate forms give 2^{k} subsets, over the budget of {budget}"
        )
    subsets = [
        tuple(cands.forms[i].label for i in range(k) if mask >> (k - 1 - i) & 1)
        for mask in range(2 ** k)
    ]
    subsets.sort(key=lambda labels: [cands.labels.index(x) for x in labels])
    if jobs > 1:
        size = max(1, len(subsets) // (4 * jobs))
        chunks = [(setup, subsets[i:i + size]) for i in range(0, len(subsets), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            found = [x for part in pool.map(_worker, chunks) for x in part]
    else:
        found = _worker((setup, subsets))
    log.debug("%d non-admissible strata before pruning", len(found))
    found.sort(key=TranslatedSubtorus.sort_key)
    maximal = [
        x for x in found
        if not any(y is not x and x.is_contained_in(y) for y in found)
    ]
    return maximal


def nonadmissible(t: TorusPoint, components: Iterable[TranslatedSubtorus]) -> bool:
    return any(c.contains(t) for c in components)


def torsion_points(n: int, max_denominator: int) -> Iterable[TorusPoint]:
    """All points whose exponents have denominators up to ``max_denominator``."""
    values = sorted({Fraction(a, q) for q in range(1, max_denominator + 1) for a in range(q)})
    for combo in itertools.product(values, repeat=n):
        yield TorusPoint(combo)

