"""Command line interface: ``admlocus <verb> ARRANGEMENT [...]``.

Exit codes: 0 success, 2 unreadable input, 3 point off the torus or class not
summing to zero, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .aomoto import AomotoClass, aomoto_ranks, cohomology_report, os_structure
from .arrangement import (
    Arrangement,
    ArrangementParseError,
    NotOnTorusError,
    build_setup,
    format_rational,
    incidence,
    line_exponents,
    parse_arrangement,
    parse_point,
    parse_rational_list,
    vector_line_exponents,
)
from .cones import positive_relation
from .torus import (
    DEFAULT_BUDGET,
    EnumerationBudgetExceeded,
    TranslatedSubtorus,
    enumerate_nonadm,
    generic_representative,
    is_admissible,
    phi_at,
    render_root_of_unity,
    stratum_is_empty,
    subtorus,
)

EXIT_PARSE = 2
EXIT_TORUS = 3
EXIT_BUDGET = 4

VERBS = ("phi", "check", "strata", "components", "resonance", "report")


class InputError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}", EXIT_PARSE) from None


def _load_json(path: str, data: bytes):
    try:
        return json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}", EXIT_PARSE) from None


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _rat(xs) -> list[str]:
    return [format_rational(x) for x in xs]


def _point_payload(t) -> dict:
    re, im = line_exponents(t)
    out = {"exponents": _rat(re), "roots_of_unity": [render_root_of_unity(x) for x in re]}
    if any(im):
        out["imag_exponents"] = _rat(im)
    return out


def _monomial(powers: list[int], names: list[str]) -> str:
    parts = []
    for p, s in zip(powers, names):
        if p == 1:
            parts.append(s)
        elif p:
            parts.append(f"{s}^{p}")
    return "*".join(parts)


def parametrization(comp: TranslatedSubtorus) -> str:
    """Coordinatewise ``root * monomial`` description in per-line monodromies."""
    re, _ = line_exponents(comp.translation)
    tangent = [vector_line_exponents(v) for v in comp.tangent]
    names = ["s"] if len(tangent) == 1 else [f"s{k + 1}" for k in range(len(tangent))]
    coords = []
    for j, x in enumerate(re):
        mono = _monomial([int(v[j]) for v in tangent], names)
        root = render_root_of_unity(x)
        if not mono:
            coords.append(root)
        elif root == "1":
            coords.append(mono)
        elif root == "-1":
            coords.append("-" + mono)
        else:
            coords.append(f"{root}*{mono}")
    body = "(" + ", ".join(coords) + ")"
    return body + (f" | {', '.join(names)} in C*" if names and tangent else "")


def _subtorus_payload(comp: TranslatedSubtorus) -> dict:
    return {
        "forms": list(comp.forms.labels),
        "dimension": comp.dimension,
        "component_group": list(comp.subtorus.component_group),
        "component": list(comp.component),
        "translation": _point_payload(comp.translation),
        "tangent": [[int(x) for x in vector_line_exponents(v)] for v in comp.tangent],
        "lattice_tangent": [list(v) for v in comp.tangent],
        "parametrization": parametrization(comp),
    }


# -- verbs ---------------------------------------------------------------------


def _phi_payload(A: Arrangement) -> dict:
    setup = build_setup(A)
    forms = []
    for f in setup.phi:
        forms.append({
            "label": f.label,
            "kind": "line" if f.label in setup.coordinate_labels else "point",
            "coeffs": list(f.coeffs),
        })
    points = [{
        "coords": list(p.coords),
        "lines": list(p.incident_labels),
        "multiplicity": p.multiplicity,
        "in_phi": p.is_multiple,
    } for p in incidence(A)]
    return {"rank": setup.rank, "basis": setup.basis_note, "phi": forms, "points": points}


def _check_payload(A: Arrangement, point_doc, betti: bool) -> dict:
    setup = build_setup(A)
    try:
        t = parse_point(point_doc, A)
    except NotOnTorusError as exc:
        raise InputError(str(exc), EXIT_TORUS) from None
    except ArrangementParseError as exc:
        raise InputError(f"point: {exc}", EXIT_PARSE) from None
    verdict = is_admissible(t, setup)
    out = {
        "point": _point_payload(t),
        "verdict": verdict.status,
        "phi_t": list(verdict.phi_t.labels),
        "implicit_forms": list(verdict.implicit_forms.labels),
    }
    rel = positive_relation(verdict.phi_t) if len(verdict.phi_t) else None
    out["positive_relation"] = None if rel is None else _rat(rel.as_list(verdict.phi_t))
    if verdict.admissible:
        out["certificate"] = {
            "witness_lattice": _rat(verdict.witness),
            "witness_per_line": _rat(vector_line_exponents(verdict.witness)),
        }
    else:
        ob = verdict.obstruction
        out["certificate"] = {
            "forms": list(ob.implicit_forms.labels),
            "matrix": [list(r) for r in ob.matrix],
            "rhs": list(ob.rhs),
        }
    if betti:
        rep = cohomology_report(A, t, setup, verdict)
        out["cohomology"] = {"status": rep["status"],
                             "betti": None if rep["betti"] is None else list(rep["betti"])}
    return out


def _strata_payload(A: Arrangement, essential: bool, budget: int, jobs: int) -> dict:
    setup = build_setup(A)
    try:
        comps = enumerate_nonadm(setup, essential_only=essential, budget=budget, jobs=jobs)
    except EnumerationBudgetExceeded as exc:
        raise InputError(str(exc), EXIT_BUDGET) from None
    return {"essential": essential, "subtori": [_subtorus_payload(c) for c in comps]}


def _components_payload(A: Arrangement, forms: Optional[str], point_doc) -> dict:
    setup = build_setup(A)
    if point_doc is not None:
        try:
            S = phi_at(parse_point(point_doc, A), setup)
        except NotOnTorusError as exc:
            raise InputError(str(exc), EXIT_TORUS) from None
        except ArrangementParseError as exc:
            raise InputError(f"point: {exc}", EXIT_PARSE) from None
    else:
        labels = [x.strip() for x in (forms or "").split(",") if x.strip()]
        try:
            S = setup.phi.subset(labels)
        except KeyError as exc:
            raise InputError(str(exc.args[0]), EXIT_PARSE) from None
    sub = subtorus(S, setup)
    comps = []
    for u in sub.component_indices():
        entry = {"component": list(u), "representative": _point_payload(sub.rep(u))}
        empty = stratum_is_empty(sub, u, setup)
        entry["stratum_empty"] = empty
        if not empty:
            t = generic_representative(S, u, setup, sub=sub)
            entry["generic_point"] = _point_payload(t)
            entry["verdict"] = is_admissible(t, setup).status
        comps.append(entry)
    rel = positive_relation(S) if len(S) else None
    return {
        "forms": list(S.labels),
        "dimension": sub.dimension,
        "component_group": list(sub.component_group),
        "order": sub.order,
        "positive_relation": None if rel is None else _rat(rel.as_list(S)),
        "lattice_tangent": [list(v) for v in sub.identity_tangent],
        "components": comps,
    }


def _resonance_payload(A: Arrangement, alpha_doc) -> dict:
    if not isinstance(alpha_doc, dict):
        raise InputError("class document: expected an object", EXIT_PARSE)
    key = "alpha" if "alpha" in alpha_doc else "exponents"
    try:
        a = parse_rational_list(alpha_doc, key, len(A))
        im = parse_rational_list(alpha_doc, "imag", len(A)) if "imag" in alpha_doc else ()
    except ArrangementParseError as exc:
        raise InputError(f"class: {exc}", EXIT_PARSE) from None
    if sum(a, Fraction(0)) != 0 or sum(im, Fraction(0)) != 0:
        raise InputError("class coefficients do not sum to zero", EXIT_TORUS)
    alpha = AomotoClass(tuple(a), tuple(im))
    os_ = os_structure(A)
    ranks = aomoto_ranks(A, alpha, os_)
    return {"alpha": _rat(a), "b1": os_.b1, "b2": os_.b2, "h1": ranks["h1"],
            "multiplication_rank": ranks["rank_degree1"]}


# -- text rendering ------------------------------------------------------------


def _text(verb: str, doc: dict) -> str:
    r = doc["result"]
    lines = [f"# {doc['tool']} {doc['version']} {verb} {r.get('arrangement', '')}".rstrip()]
    if verb in ("phi", "report"):
        phi = r if verb == "phi" else r["phi"]
        lines.append(f"rank {phi['rank']} ({phi['basis']})")
        for f in phi["phi"]:
            lines.append(f"  {f['label']:<12} {f['kind']:<5} {f['coeffs']}")
        for p in phi["points"]:
            tag = "" if p["in_phi"] else "  (double)"
            lines.append(f"  point {p['coords']} on lines {','.join(p['lines'])}{tag}")
    if verb == "check":
        lines.append(f"point    {' '.join(r['point']['roots_of_unity'])}")
        lines.append(f"verdict  {r['verdict']}")
        lines.append(f"Phi_t    {', '.join(r['phi_t']) or '(empty)'}")
        lines.append(f"implicit {', '.join(r['implicit_forms']) or '(none)'}")
        cert = r["certificate"]
        if "witness_per_line" in cert:
            lines.append(f"witness  {' '.join(cert['witness_per_line'])}")
        else:
            lines.append(f"no lattice point: {cert['matrix']} lam = {cert['rhs']}")
        if "cohomology" in r:
            lines.append(f"betti    {r['cohomology']['betti'] or r['cohomology']['status']}")
    if verb in ("strata", "report"):
        strata = r if verb == "strata" else r["strata"]
        lines.append(f"{len(strata['subtori'])} non-admissible subtori"
                     + (" (essential)" if strata["essential"] else ""))
        for s in strata["subtori"]:
            lines.append(f"  dim {s['dimension']}  {', '.join(s['forms'])}")
            lines.append(f"    {s['parametrization']}")
    if verb == "report":
        lines.append(f"trivial local system betti {r['unit_betti']}")
    if verb == "components":
        lines.append(f"forms {', '.join(r['forms'])}")
        lines.append(f"dimension {r['dimension']}  C(S) {r['component_group'] or 'trivial'}")
        for c in r["components"]:
            status = "empty stratum" if c["stratum_empty"] else c["verdict"]
            lines.append(f"  {c['component']}  {' '.join(c['representative']['roots_of_unity'])}  {status}")
    if verb == "resonance":
        lines.append(f"alpha {' '.join(r['alpha'])}")
        lines.append(f"h1 {r['h1']}  (rank of alpha on degree 1: {r['multiplication_rank']})")
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="admlocus", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("arrangement", help="arrangement JSON document")
        sp.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
        sp.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("phi", help="list the forms of Phi and the incidence points")
    common(sp)
    sp = sub.add_parser("check", help="decide admissibility of one point")
    common(sp)
    sp.add_argument("point", help="monodromy point JSON document")
    sp.add_argument("--betti", action="store_true", help="add Aomoto Betti numbers when admissible")

    def enum_opts(sp):
        sp.add_argument("--essential", action="store_true", help="only strata avoiding t_j = 1")
        sp.add_argument("--budget", type=int, default=None,
                        help="maximum number of candidate subsets (env STRATUM_BUDGET)")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("strata", help="enumerate the non-admissible locus")
    common(sp)
    enum_opts(sp)
    sp = sub.add_parser("components", help="describe T(S) for a set of forms")
    common(sp)
    sp.add_argument("--forms", help="comma separated form labels")
    sp.add_argument("--point", help="use Phi_t of this point document instead")
    sp = sub.add_parser("resonance", help="Aomoto H^1 for a class alpha")
    common(sp)
    sp.add_argument("alpha", help='class document {"alpha": ["p/q", ...]}')
    sp = sub.add_parser("report", help="Phi, non-admissible locus and trivial Betti numbers")
    common(sp)
    enum_opts(sp)
    return p


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("STRATUM_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"STRATUM_BUDGET={env!r} is not an integer", EXIT_PARSE) from None
    return DEFAULT_BUDGET


def run(args) -> dict:
    raw = _read(args.arrangement)
    digests = {"arrangement": _digest(raw)}
    try:
        A = parse_arrangement(_load_json(args.arrangement, raw))
    except ArrangementParseError as exc:
        raise InputError(f"{args.arrangement}: {exc}", EXIT_PARSE) from None
    verb = args.verb
    if verb == "phi":
        result = _phi_payload(A)
    elif verb == "check":
        praw = _read(args.point)
        digests["point"] = _digest(praw)
        result = _check_payload(A, _load_json(args.point, praw), args.betti)
    elif verb == "strata":
        result = _strata_payload(A, args.essential, _budget(args), args.jobs)
    elif verb == "components":
        pdoc = None
        if args.point:
            praw = _read(args.point)
            digests["point"] = _digest(praw)
            pdoc = _load_json(args.point, praw)
        elif not args.forms:
            raise InputError("components needs --forms or --point", EXIT_PARSE)
        result = _components_payload(A, args.forms, pdoc)
    elif verb == "resonance":
        araw = _read(args.alpha)
        digests["alpha"] = _digest(araw)
        result = _resonance_payload(A, _load_json(args.alpha, araw))
    else:
        unit = cohomology_report(A, _unit(A))
        result = {
            "phi": _phi_payload(A),
            "strata": _strata_payload(A, args.essential, _budget(args), args.jobs),
            "unit_betti": list(unit["betti"]),
        }
    result = {"arrangement": A.name, **result}
    return {"tool": "admlocus", "version": __version__, "verb": verb,
            "input_digest": digests, "result": result}


def _unit(A: Arrangement):
    from .torus import TorusPoint
    return TorusPoint.unit(len(A) - 1)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        doc = run(args)
    except InputError as exc:
        print(f"admlocus: {exc}", file=sys.stderr)
        return exc.code
    if args.timing:
        doc["timing_seconds"] = round(time.perf_counter() - start, 3)
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(_text(args.verb, doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
