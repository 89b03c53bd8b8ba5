"""Rational cone geometry for finite sets of integral linear forms.

For a form set ``S`` the nonpositivity cone is ``D(S) = {v : a(v) <= 0 for a in S}``
and ``Cone(S)`` is the nonnegative span of ``S``. The two are dual up to sign,
which is what every decision below relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from . import lp
from .exact_linalg import DimensionError, integer_kernel, transpose


@dataclass(frozen=True)
class FormVector:
    """An integral linear form, coordinates taken in the dual lattice basis."""

    label: str
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def __call__(self, v: Sequence) -> Fraction:
        if len(v) != len(self.coeffs):
            raise DimensionError(f"form {self.label} has rank {len(self.coeffs)}, vector has {len(v)}")
        return sum((c * Fraction(x) for c, x in zip(self.coeffs, v)), Fraction(0))

    def __neg__(self) -> "FormVector":
        return FormVector(f"-{self.label}", tuple(-c for c in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class FormSet:
    forms: tuple[FormVector, ...]
    ambient_rank: int

    def __post_init__(self):
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        labels = [f.label for f in forms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate form labels in {labels}")
        for f in forms:
            if len(f.coeffs) != self.ambient_rank:
                raise DimensionError(
                    f"form {f.label} has {len(f.coeffs)} coefficients, expected {self.ambient_rank}"
                )

    def __iter__(self) -> Iterator[FormVector]:
        return iter(self.forms)

    def __len__(self) -> int:
        return len(self.forms)

    def __contains__(self, item) -> bool:
        if isinstance(item, FormVector):
            return item in self.forms
        return item in self.labels

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f.label for f in self.forms)

    def matrix(self) -> list[list[int]]:
        return [list(f.coeffs) for f in self.forms]

    def subset(self, keep: Iterable) -> "FormSet":
        """Sub-FormSet in this set's order; ``keep`` holds labels or forms."""
        wanted = {k.label if isinstance(k, FormVector) else k for k in keep}
        unknown = wanted - set(self.labels)
        if unknown:
            raise KeyError(f"unknown form labels {sorted(unknown)}")
        return FormSet(tuple(f for f in self.forms if f.label in wanted), self.ambient_rank)

    def without(self, drop: Iterable) -> "FormSet":
        gone = {k.label if isinstance(k, FormVector) else k for k in drop}
        return FormSet(tuple(f for f in self.forms if f.label not in gone), self.ambient_rank)

    def __getitem__(self, label: str) -> FormVector:
        for f in self.forms:
            if f.label == label:
                return f
        raise KeyError(label)


@dataclass(frozen=True)
class ConeCertificate:
    """Nonnegative rational coefficients ``c`` with ``sum c[a] * a == target``."""

    coefficients: Mapping[str, Fraction] = field(default_factory=dict)

    def combination(self, S: FormSet) -> list[Fraction]:
        out = [Fraction(0)] * S.ambient_rank
        for f in S:
            c = self.coefficients.get(f.label, 0)
            for i, a in enumerate(f.coeffs):
                out[i] += c * a
        return out

    def verify(self, target: Sequence[int], S: FormSet) -> bool:
        if any(c < 0 for c in self.coefficients.values()):
            return False
        if not set(self.coefficients) <= set(S.labels):
            return False
        return self.combination(S) == [Fraction(t) for t in target]

    def as_list(self, S: FormSet) -> list[Fraction]:
        return [Fraction(self.coefficients.get(label, 0)) for label in S.labels]


def _target_coeffs(target) -> tuple[int, ...]:
    return target.coeffs if isinstance(target, FormVector) else tuple(target)


def cone_contains(target, S: FormSet, method: str = "auto") -> Optional[ConeCertificate]:
    """Certificate that ``target`` lies in ``Cone(S)``, or ``None``."""
    t = _target_coeffs(target)
    if len(t) != S.ambient_rank:
        raise DimensionError(f"target has length {len(t)}, forms have rank {S.ambient_rank}")
    A = transpose(S.matrix(), 0) if len(S) else [[] for _ in range(S.ambient_rank)]
    x = lp.nonneg_solution(A, list(t), nvars=len(S), method=method)
    if x is None:
        return None
    return ConeCertificate({f.label: c for f, c in zip(S, x)})


def implicit_equalities(S: FormSet, method: str = "auto") -> FormSet:
    """Forms of ``S`` vanishing identically on ``D(S)``, i.e. ``-a in Cone(S)``."""
    return FormSet(tuple(a for a in S if cone_contains((-a).coeffs, S, method) is not None),
                   S.ambient_rank)


def positive_relation(S: FormSet) -> Optional[ConeCertificate]:
    """Strictly positive ``c`` with ``sum c[a] * a == 0``, or ``None``.

    Solved as ``c >= 1`` minimizing ``sum c``, so when the relation space is a
    single ray the answer is its smallest representative with entries >= 1.
    """
    if not len(S):
        raise ValueError("positive_relation needs a nonempty form set")
    M = S.matrix()
    A = transpose(M)
    rhs = [-sum(row[i] for row in M) for i in range(S.ambient_rank)]
    res = lp.simplex(A, rhs, [1] * len(S), nvars=len(S))
    if res is None:
        return None
    shift = res[0]
    return ConeCertificate({f.label: 1 + c for f, c in zip(S, shift)})


def d0_subspace(S: FormSet) -> list[list[int]]:
    """Saturated integer basis of the common null space of ``S``."""
    return integer_kernel(S.matrix(), ncols=S.ambient_rank)


def relative_interior_point(S: FormSet, implicit: Optional[FormSet] = None) -> list[Fraction]:
    """A point of ``D(S)`` where exactly the implicit equalities vanish."""
    if implicit is None:
        implicit = implicit_equalities(S)
    strict = [f for f in S if f.label not in implicit.labels]
    n = S.ambient_rank
    G = [list(f.coeffs) for f in strict]
    E = implicit.matrix()
    v = lp.feasible_point(G, [-1] * len(G), E, [0] * len(E), nvars=n)
    if v is None:
        raise ArithmeticError("cone has no relative interior point; implicit set is wrong")
    return v
