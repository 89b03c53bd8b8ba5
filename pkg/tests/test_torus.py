import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admlocus.arrangement import build_setup
from admlocus.cones import FormSet, FormVector, implicit_equalities, positive_relation
from admlocus.exact_linalg import rank
from admlocus.torus import (
    EnumerationBudgetExceeded,
    PointError,
    TorusPoint,
    canonicalize,
    enumerate_nonadm,
    generic_representative,
    in_identity_component,
    is_admissible,
    nonadmissible,
    phi_at,
    render_root_of_unity,
    stratum_is_empty,
    subtorus,
    torsion_points,
    verify_witness,
)

from helpers import brute_force_witness, golden, golden_point, interesting_points, line_point, random_setup, subsets

F = Fraction
seeds = st.integers(0, 10 ** 9)


@pytest.fixture(scope="module")
def non_fano():
    return build_setup(golden("non_fano"))


@pytest.fixture(scope="module")
def deleted_b3():
    return build_setup(golden("deleted_b3"))


def point_forms(setup):
    return setup.phi.without(setup.coordinate_labels)


def test_canonicalize_examples():
    assert canonicalize([0, 0]).is_unit
    assert canonicalize([F(3, 2), F(-1, 4)]).real == (F(1, 2), F(3, 4))
    assert canonicalize([F(7, 3), 0]).real == (F(1, 3), 0)
    t = canonicalize([F(5, 2), F(9, 4)])
    assert canonicalize(t.real) == t
    with pytest.raises(PointError):
        canonicalize([0, 0], 3)


def test_root_rendering():
    assert [render_root_of_unity(F(x, 9)) for x in (0, 1, 4)] == ["1", "zeta_9", "zeta_9^4"]
    assert render_root_of_unity(F(1, 2)) == "-1"
    assert render_root_of_unity(F(-1, 3)) == "zeta_3^2"


def test_group_law():
    a = canonicalize([F(1, 3), F(1, 2)])
    assert (a * a.inverse()).is_unit
    assert (a ** 6).is_unit and a.order == 6


def test_phi_at_examples(non_fano):
    assert phi_at(TorusPoint.unit(6), non_fano).labels == non_fano.phi.labels
    rho = golden_point("non_fano", "rho")
    assert set(phi_at(rho, non_fano).labels) == {
        "a_1", "a_4", "a_7", "a_125", "a_136", "a_237", "a_246", "a_345", "a_567"}
    # all exponents 1/p: a form is trivial exactly when its coefficient sum is divisible by p
    p = 5
    t = canonicalize([F(1, p)] * 6)
    expected = {f.label for f in non_fano.phi if sum(f.coeffs) % p == 0}
    assert set(phi_at(t, non_fano).labels) == expected
    from admlocus.torus import CharacterSetup
    positive = CharacterSetup(2, FormSet((FormVector("x", (1, 0)), FormVector("y", (1, 2))), 2))
    assert len(phi_at(canonicalize([F(1, 5)] * 2), positive)) == 0


def test_subtorus_examples(non_fano, deleted_b3):
    empty = subtorus(FormSet((), 6), non_fano)
    assert empty.dimension == 6 and empty.component_group == () and empty.component_reps[0].is_unit
    rho = golden_point("non_fano", "rho")
    sub = subtorus(phi_at(rho, non_fano), non_fano)
    assert sub.dimension == 0 and sub.component_group == (2,)
    assert set(sub.component_reps) == {TorusPoint.unit(6), rho}
    b3 = subtorus(point_forms(deleted_b3), deleted_b3)
    assert b3.dimension == 1 and b3.order == 2
    assert b3.component_reps[0].is_unit


def test_non_pappus_subtorus():
    setup = build_setup(golden("non_pappus"))
    S = point_forms(setup)
    sub = subtorus(S, setup)
    assert sub.dimension == 0 and sub.component_group == (9,)
    rho = golden_point("non_pappus", "rho")
    assert set(sub.component_reps) == {rho ** k for k in range(9)}
    for label in S.labels:
        rest = S.without([label])
        assert rank(rest.matrix()) == 8


def test_in_identity_component(non_fano, deleted_b3):
    S = point_forms(deleted_b3)
    assert in_identity_component(TorusPoint.unit(7), S)
    A = golden("deleted_b3")
    t1 = line_point(A, [F(1, 2)] * 4 + [0] * 4)
    assert in_identity_component(t1, S)
    assert not in_identity_component(golden_point("deleted_b3", "t2_i"), S)
    rho = golden_point("non_fano", "rho")
    assert not in_identity_component(rho, phi_at(rho, non_fano))
    with pytest.raises(PointError, match="a_125"):
        in_identity_component(golden_point("non_fano", "unit").shifted([0, F(1, 3)] + [0] * 4),
                              non_fano.phi.subset(["a_125"]))


def test_is_admissible_examples(non_fano, deleted_b3):
    for name in ("non_fano", "deleted_b3", "non_pappus"):
        setup = build_setup(golden(name))
        v = is_admissible(golden_point(name, "unit"), setup)
        assert v.admissible and not any(v.witness)
    assert not is_admissible(golden_point("non_fano", "rho"), non_fano).admissible
    tri = golden_point("non_fano", "triple125")
    v = is_admissible(tri, non_fano)
    assert v.admissible and verify_witness(non_fano, tri, v.witness)
    assert set(v.phi_t.labels) == {"a_3", "a_4", "a_6", "a_7", "a_125"}
    # the five forms add up to the sum of all line forms, which is zero on the lattice;
    # admissibility comes from the identity component, not from independence
    assert positive_relation(v.phi_t).as_list(v.phi_t) == [1] * 5
    assert in_identity_component(tri, v.phi_t)
    v = is_admissible(golden_point("deleted_b3", "t2_i"), deleted_b3)
    assert not v.admissible and v.obstruction.recheck()


def test_generic_representative_examples(non_fano, deleted_b3):
    t = generic_representative(FormSet((), 6), (), non_fano)
    assert len(phi_at(t, non_fano)) == 0 and t.order >= 7
    rho = golden_point("non_fano", "rho")
    S = phi_at(rho, non_fano)
    assert generic_representative(S, (1,), non_fano) == rho
    assert generic_representative(S, (0,), non_fano) is None  # 1 has Phi_1 = Phi

    S = point_forms(deleted_b3)
    A = golden("deleted_b3")
    g = generic_representative(S, (1,), deleted_b3)
    assert phi_at(g, deleted_b3).labels == S.labels
    sub = subtorus(S, deleted_b3)
    assert sub.component_of(g) == (1,)
    # the parameter zeta_5 point on the same component is an equally valid choice
    z = F(1, 5)
    zeta5 = line_point(A, [z, F(1, 2) - z, F(1, 2) - z, z, 2 * z, F(1, 2), -2 * z, F(1, 2)])
    assert phi_at(zeta5, deleted_b3).labels == S.labels
    assert sub.component_of(zeta5) == (1,)
    assert is_admissible(zeta5, deleted_b3).admissible == is_admissible(g, deleted_b3).admissible


def test_stratum_emptiness_matches_definition(deleted_b3):
    S = point_forms(deleted_b3)
    sub = subtorus(S, deleted_b3)
    A = golden("deleted_b3")
    # T1 = (s, 1/s, 1/s, s, s^2, 1, 1/s^2, 1): t_6 = t_8 = 1 along the whole component
    assert stratum_is_empty(sub, (0,), deleted_b3)
    assert not stratum_is_empty(sub, (1,), deleted_b3)
    for k in range(1, 12):
        s_ = F(k, 13)
        t = line_point(A, [s_, -s_, -s_, s_, 2 * s_, 0, -2 * s_, 0])
        assert sub.component_of(t) == (0,)
        assert {"a_6", "a_8"} <= set(phi_at(t, deleted_b3).labels)


def test_enumeration_examples(deleted_b3):
    [T2] = enumerate_nonadm(deleted_b3, essential_only=True)
    assert T2.dimension == 1 and T2.component == (1,)
    assert T2.contains(golden_point("deleted_b3", "t2_i"))
    assert not T2.contains(golden_point("deleted_b3", "t1_minus1"))
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_nonadm(deleted_b3, budget=1000)


def test_enumeration_parallel_matches_serial(deleted_b3):
    serial = enumerate_nonadm(deleted_b3, essential_only=True)
    parallel = enumerate_nonadm(deleted_b3, essential_only=True, jobs=2)
    assert [(c.forms.labels, c.component) for c in serial] == [(c.forms.labels, c.component) for c in parallel]


# -- properties over random small setups ------------------------------------------


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_unit_is_admissible(seed):
    setup = random_setup(random.Random(seed))
    v = is_admissible(TorusPoint.unit(setup.rank), setup)
    assert v.admissible and verify_witness(setup, TorusPoint.unit(setup.rank), v.witness)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_oracle_agreement(seed):
    rng = random.Random(seed)
    setup = random_setup(rng)
    for t in interesting_points(setup, rng):
        v = is_admissible(t, setup)
        if v.admissible:
            assert verify_witness(setup, t, v.witness)
        else:
            assert v.obstruction.recheck()
            assert brute_force_witness(setup, t) is None


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_stratum_constancy(seed):
    rng = random.Random(seed)
    setup = random_setup(rng)
    for S in list(subsets(setup.phi))[:16]:
        sub = subtorus(S, setup)
        for u in sub.component_indices()[:4]:
            reps = [generic_representative(S, u, setup, attempt=a, sub=sub) for a in range(3)]
            if reps[0] is None:
                assert all(r is None for r in reps)
                continue
            verdicts = {is_admissible(r, setup).admissible for r in reps}
            assert len(verdicts) == 1


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_identity_component_is_admissible(seed):
    rng = random.Random(seed)
    setup = random_setup(rng)
    for S in subsets(setup.phi):
        sub = subtorus(S, setup)
        t = generic_representative(S, (0,) * len(sub.component_group), setup, sub=sub)
        if t is not None:
            assert in_identity_component(t, S)
            assert is_admissible(t, setup).admissible


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_positive_relation_criterion(seed):
    rng = random.Random(seed)
    setup = random_setup(rng, max_rank=3)
    for t in torsion_points(setup.rank, 4):
        S = phi_at(t, setup)
        v = is_admissible(t, setup)
        if len(S) and rank(S.matrix()) == len(S):
            assert v.admissible
        if len(S) and positive_relation(S) is not None:
            assert v.admissible == in_identity_component(t, S)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_enumeration_covers_every_nonadmissible_torsion_point(seed):
    rng = random.Random(seed)
    setup = random_setup(rng, max_rank=3, max_forms=5)
    comps = enumerate_nonadm(setup)
    for c in comps:
        assert not any(c is not d and c.is_contained_in(d) for d in comps)
    for t in torsion_points(setup.rank, 4):
        if not is_admissible(t, setup).admissible:
            assert nonadmissible(t, comps)


def test_implicit_subset_is_what_decides():
    # a(v) = x with the opposite form -x: both must vanish, so t = (1/2) is non-admissible
    S = FormSet((FormVector("p", (1,)), FormVector("m", (-1,))), 1)
    from admlocus.torus import CharacterSetup
    setup = CharacterSetup(1, S)
    assert implicit_equalities(S).labels == ("p", "m")
    assert is_admissible(canonicalize([F(1, 2)]), setup).admissible
    S2 = FormSet((FormVector("p", (2,)), FormVector("m", (-2,))), 1)
    setup2 = CharacterSetup(1, S2)
    assert not is_admissible(canonicalize([F(1, 2)]), setup2).admissible


def test_generic_representative_with_balanced_form():
    # (1, -2, 1) is orthogonal to arithmetic progressions; the search must still move it
    from admlocus.torus import CharacterSetup
    setup = CharacterSetup(3, FormSet((FormVector("b", (1, -2, 1)),), 3))
    for attempt in range(3):
        t = generic_representative(FormSet((), 3), (), setup, attempt=attempt)
        assert len(phi_at(t, setup)) == 0
