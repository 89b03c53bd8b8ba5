"""Random small setups and a brute-force admissibility oracle shared by the tests."""

import itertools
import random
from fractions import Fraction
from math import lcm
from pathlib import Path

import numpy as np

from admlocus.arrangement import load_arrangement, parse_point
from admlocus.cones import FormSet, FormVector
from admlocus.torus import CharacterSetup, TorusPoint, generic_representative, subtorus

DATA = Path(__file__).resolve().parent.parent / "src" / "admlocus" / "data"


def golden(name):
    return load_arrangement(DATA / f"{name}.json")


def golden_point(name, which):
    A = golden(name)
    return parse_point((DATA / f"{name}.{which}.json").read_text(), A)


def random_setup(rng: random.Random, max_rank=4, max_forms=6, bound=3) -> CharacterSetup:
    """Rank <= max_rank, |Phi| <= max_forms, coefficients in [-bound, bound].

    Half of the time the last form is minus the sum of earlier ones (when that
    stays in range), so that positive relations show up often.
    """
    n = rng.randint(1, max_rank)
    m = rng.randint(1, max_forms)
    vecs: list[tuple[int, ...]] = []
    while len(vecs) < m:
        if len(vecs) >= 2 and rng.random() < 0.5:
            chosen = rng.sample(vecs, rng.randint(1, len(vecs)))
            v = tuple(-sum(c[i] for c in chosen) for i in range(n))
            if any(v) and max(map(abs, v)) <= bound and v not in vecs:
                vecs.append(v)
                continue
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        if any(v) and v not in vecs:
            vecs.append(v)
    forms = tuple(FormVector(f"f{i}", v) for i, v in enumerate(vecs))
    return CharacterSetup(n, FormSet(forms, n))


def subsets(S: FormSet):
    for r in range(len(S) + 1):
        for combo in itertools.combinations(S.labels, r):
            yield S.subset(combo)


def interesting_points(setup: CharacterSetup, rng: random.Random, limit=12):
    """Component representatives and generic points of random T(S)."""
    out = [TorusPoint.unit(setup.rank)]
    all_subsets = list(subsets(setup.phi))
    rng.shuffle(all_subsets)
    for S in all_subsets[:limit]:
        sub = subtorus(S, setup)
        for u in sub.component_indices()[:4]:
            out.append(sub.rep(u))
            t = generic_representative(S, u, setup, sub=sub)
            if t is not None:
                out.append(t)
    return out


def brute_force_witness(setup: CharacterSetup, t: TorusPoint, box=5):
    """Search ``v = t.real + lam`` with ``|lam_i| <= box`` avoiding positive integer values.

    Independent of the cone machinery: a plain vectorized sweep. Returns the
    witness or ``None`` (inconclusive).
    """
    n = setup.rank
    L = lcm(1, *(x.denominator for x in t.real))
    r = np.array([int(x * L) for x in t.real], dtype=np.int64)
    F = np.array(setup.phi.matrix(), dtype=np.int64).reshape(len(setup.phi), n)
    imag_zero = np.array([f(t.imag) == 0 for f in setup.phi])
    grid = np.array(list(itertools.product(range(-box, box + 1), repeat=n)), dtype=np.int64)
    vals = (grid * L + r) @ F.T  # L * alpha(v)
    bad = (vals % L == 0) & (vals > 0) & imag_zero
    ok = ~bad.any(axis=1)
    if not ok.any():
        return None
    lam = grid[int(np.argmax(ok))]
    return [x + int(l) for x, l in zip(t.real, lam)]


def line_point(A, exps):
    """Point document helper: per-line exponents given as strings or Fractions."""
    return parse_point({"exponents": [str(Fraction(x)) for x in exps]}, A)
