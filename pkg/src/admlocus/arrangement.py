"""Rational line arrangements in the projective plane.

An arrangement of ``N = n + 1`` lines has character torus
``{(t_0, ..., t_n) : t_0 ... t_n = 1}``. Its exponent lattice is realized in the
basis ``b_j = e_j - e_{j+1}`` of ``{x in Z^N : sum x = 0}``; forms are written
in the dual coordinates ``f(b_0), ..., f(b_{n-1})``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .cones import FormSet, FormVector
from .torus import CharacterSetup, PointError, TorusPoint


class ArrangementParseError(ValueError):
    """Malformed arrangement or point document; the message names the location."""


class NotOnTorusError(PointError):
    pass


def _primitive_sign_normalized(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return tuple(v)
    out = [x // g for x in v]
    lead = next(x for x in out if x)
    if lead < 0:
        out = [-x for x in out]
    return tuple(out)


@dataclass(frozen=True)
class ProjectiveLine:
    label: str
    coeffs: tuple[int, int, int]

    def __post_init__(self):
        if len(self.coeffs) != 3:
            raise ValueError("a projective line needs three coefficients")
        if not any(self.coeffs):
            raise ValueError(f"line {self.label} has zero coefficients")
        object.__setattr__(self, "coeffs", _primitive_sign_normalized([int(c) for c in self.coeffs]))

    def vanishes_at(self, p: Sequence[int]) -> bool:
        return sum(a * b for a, b in zip(self.coeffs, p)) == 0


@dataclass(frozen=True)
class Arrangement:
    lines: tuple[ProjectiveLine, ...]
    name: str = ""

    def __post_init__(self):
        lines = tuple(self.lines)
        object.__setattr__(self, "lines", lines)
        if len(lines) < 3:
            raise ValueError("an arrangement needs at least 3 lines")
        labels = [ln.label for ln in lines]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate line labels in {labels}")
        seen = {}
        for ln in lines:
            if ln.coeffs in seen:
                raise ValueError(f"duplicate line: {ln.label} equals {seen[ln.coeffs]}")
            seen[ln.coeffs] = ln.label

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ln.label for ln in self.lines)

    def __len__(self) -> int:
        return len(self.lines)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class IncidencePoint:
    coords: tuple[int, int, int]
    incident_labels: tuple[str, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.incident_labels)

    @property
    def is_multiple(self) -> bool:
        return self.multiplicity >= 3


def _line_from_json(entry: Any, where: str) -> ProjectiveLine:
    if not isinstance(entry, dict):
        raise ArrangementParseError(f"{where}: expected an object")
    if "label" not in entry or "coeffs" not in entry:
        raise ArrangementParseError(f"{where}: needs 'label' and 'coeffs'")
    label, coeffs = entry["label"], entry["coeffs"]
    if not isinstance(label, str) or not label:
        raise ArrangementParseError(f"{where}.label: expected a nonempty string")
    if (not isinstance(coeffs, list) or len(coeffs) != 3
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in coeffs)):
        raise ArrangementParseError(f"{where}.coeffs: expected three integers")
    if not any(coeffs):
        raise ArrangementParseError(f"{where}.coeffs: zero coefficient triple")
    return ProjectiveLine(label, tuple(coeffs))


def parse_arrangement(document: Union[str, bytes, dict]) -> Arrangement:
    """Build an arrangement from its JSON document (text or already decoded)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ArrangementParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(document, dict) or not isinstance(document.get("lines"), list):
        raise ArrangementParseError("document: expected an object with a 'lines' list")
    name = document.get("name", "")
    if not isinstance(name, str):
        raise ArrangementParseError("name: expected a string")
    lines = [_line_from_json(e, f"lines[{i}]") for i, e in enumerate(document["lines"])]
    seen: dict = {}
    for i, ln in enumerate(lines):
        if ln.coeffs in seen:
            raise ArrangementParseError(f"lines[{i}]: duplicate line (same as {seen[ln.coeffs]})")
        seen[ln.coeffs] = ln.label
    if len({ln.label for ln in lines}) != len(lines):
        raise ArrangementParseError("lines: duplicate labels")
    if len(lines) < 3:
        raise ArrangementParseError("lines: at least 3 lines are required")
    return Arrangement(tuple(lines), name)


def load_arrangement(path: Union[str, Path]) -> Arrangement:
    return parse_arrangement(Path(path).read_text(encoding="utf-8"))


def arrangement_to_json(A: Arrangement) -> dict:
    return {"name": A.name, "lines": [{"label": ln.label, "coeffs": list(ln.coeffs)} for ln in A.lines]}


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def incidence(A: Arrangement) -> list[IncidencePoint]:
    """All intersection points, each with every line through it, in line order."""
    points: dict[tuple, list[int]] = {}
    for i, j in itertools.combinations(range(len(A)), 2):
        p = _primitive_sign_normalized(_cross(A.lines[i].coeffs, A.lines[j].coeffs))
        if p not in points:
            points[p] = [k for k, ln in enumerate(A.lines) if ln.vanishes_at(p)]
    out = [IncidencePoint(p, tuple(A.lines[k].label for k in idx)) for p, idx in points.items()]
    out.sort(key=lambda q: [A.index(x) for x in q.incident_labels])
    return out


def multiple_points(A: Arrangement) -> list[IncidencePoint]:
    return [p for p in incidence(A) if p.is_multiple]


def point_label(labels: Sequence[str]) -> str:
    if all(len(x) == 1 for x in labels):
        return "a_" + "".join(labels)
    return "a_{" + ",".join(labels) + "}"


def coordinate_label(label: str) -> str:
    return f"a_{label}"


def line_form_coeffs(N: int, members: Sequence[int]) -> tuple[int, ...]:
    """Dual coordinates of ``x_{i_1} + ... + x_{i_r}`` on the basis ``e_j - e_{j+1}``."""
    out = [0] * (N - 1)
    for i in members:
        if i < N - 1:
            out[i] += 1
        if i > 0:
            out[i - 1] -= 1
    return tuple(out)


def build_setup(A: Arrangement) -> CharacterSetup:
    N = len(A)
    forms = [FormVector(coordinate_label(ln.label), line_form_coeffs(N, [i]))
             for i, ln in enumerate(A.lines)]
    coord = frozenset(f.label for f in forms)
    for p in multiple_points(A):
        forms.append(FormVector(point_label(p.incident_labels),
                                line_form_coeffs(N, [A.index(x) for x in p.incident_labels])))
    return CharacterSetup(
        rank=N - 1,
        phi=FormSet(tuple(forms), N - 1),
        basis_note="e_j - e_{j+1} in the sum-zero sublattice of Z^%d, lines in file order" % N,
        coordinate_labels=coord,
    )


def point_form_members(A: Arrangement, label: str) -> tuple[str, ...]:
    for p in multiple_points(A):
        if point_label(p.incident_labels) == label:
            return p.incident_labels
    raise KeyError(label)


# -- torus points ---------------------------------------------------------------


def lattice_coords_from_line_exponents(q: Sequence[Fraction]) -> list[Fraction]:
    """Basis coordinates of a sum-zero vector: prefix sums of its entries."""
    out, acc = [], Fraction(0)
    for x in q[:-1]:
        acc += x
        out.append(acc)
    return out


def line_exponents(t: TorusPoint) -> tuple[list[Fraction], list[Fraction]]:
    """Per-line exponents (real, imaginary) of a point; real parts reduced mod 1."""
    def expand(c):
        n = len(c)
        return [c[0] if n else Fraction(0)] + [c[k] - c[k - 1] for k in range(1, n)] + \
               [-c[n - 1] if n else Fraction(0)]
    re = [x - (x.numerator // x.denominator) for x in expand(list(t.real))]
    return re, expand(list(t.imag))


def vector_line_exponents(v: Sequence[Fraction]) -> list[Fraction]:
    """Per-line values of a lattice-basis vector (no reduction)."""
    n = len(v)
    return [Fraction(v[0])] + [Fraction(v[k]) - Fraction(v[k - 1]) for k in range(1, n)] + [-Fraction(v[n - 1])]


def torus_point_from_monodromy(q: Sequence, imag: Optional[Sequence] = None) -> TorusPoint:
    """Point with per-line monodromies ``Exp(q_j + i*imag_j)``; needs ``sum q`` integral."""
    q = [Fraction(x) for x in q]
    s = sum(q, Fraction(0))
    if s.denominator != 1:
        raise NotOnTorusError(f"point not on character torus: exponents sum to {s}")
    q[0] -= s
    im = None
    if imag is not None:
        im = [Fraction(x) for x in imag]
        if len(im) != len(q):
            raise NotOnTorusError("imaginary exponents have the wrong length")
        if sum(im, Fraction(0)) != 0:
            raise NotOnTorusError("point not on character torus: imaginary exponents do not sum to 0")
        im = lattice_coords_from_line_exponents(im)
    return TorusPoint(tuple(lattice_coords_from_line_exponents(q)), tuple(im) if im else ())


def _parse_rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ArrangementParseError(f"{where}: expected an integer or a 'p/q' string")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise ArrangementParseError(f"{where}: cannot read {x!r} as a rational") from None


def parse_rational_list(doc: Any, key: str, length: Optional[int] = None) -> list[Fraction]:
    values = doc.get(key)
    if not isinstance(values, list):
        raise ArrangementParseError(f"{key}: expected a list")
    if length is not None and len(values) != length:
        raise ArrangementParseError(f"{key}: expected {length} entries, got {len(values)}")
    return [_parse_rational(x, f"{key}[{i}]") for i, x in enumerate(values)]


def parse_point(document: Union[str, bytes, dict], A: Arrangement) -> TorusPoint:
    """Read a monodromy point document ``{"exponents": ["p/q", ...]}`` for ``A``."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ArrangementParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(document, dict):
        raise ArrangementParseError("point document: expected an object")
    q = parse_rational_list(document, "exponents", len(A))
    imag = None
    if "imag_exponents" in document:
        imag = parse_rational_list(document, "imag_exponents", len(A))
    return torus_point_from_monodromy(q, imag)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def point_to_json(t: TorusPoint) -> dict:
    re, im = line_exponents(t)
    doc = {"exponents": [format_rational(x) for x in re]}
    if any(im):
        doc["imag_exponents"] = [format_rational(x) for x in im]
    return doc
