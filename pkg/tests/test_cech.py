import pytest
from hypothesis import given
from hypothesis import strategies as st

from superlift.analytic import ComponentFunction as CF
from superlift.cech import (Atlas, CoboundaryProblem, Obstruction, Splitting, check_atlas_cocycle,
                            consistency_compose, solve_coboundary)
from superlift.errors import DegreeBoundExceeded, SchemaError
from superlift.supermap import compose, random_superconformal_n2
from superlift.sphere import make_supersphere
from superlift.torus import ThetaType, jacobi_type, lattice_transition_from_type, make_supertorus


def test_splitting_examples():
    s = solve_coboundary(CoboundaryProblem({0: 1}, {-1: 1j}))
    assert isinstance(s, Splitting)
    assert s.b_nor == pytest.approx({1: -1j}) and not s.b_sou
    s = solve_coboundary(CoboundaryProblem({-1: 1}, {-2: -1}))
    assert s.b_nor == pytest.approx({1: -1}) and not s.b_sou


def test_obstruction_example():
    obs = solve_coboundary(CoboundaryProblem({1: 1}, {4: 1j}))
    assert isinstance(obs, Obstruction)
    assert obs.uncovered == [1, 2, 3]
    assert obs.residual_cocycle == pytest.approx({1: 1})
    js = obs.to_json()
    assert js["uncovered_powers"] == [1, 2, 3]


def test_degree_bound_exceeded():
    with pytest.raises(DegreeBoundExceeded):
        solve_coboundary(CoboundaryProblem({5: 1}, {0: 1}, degree_bound=2))


def test_weight_must_be_nonzero():
    with pytest.raises(ValueError):
        CoboundaryProblem({0: 1}, {})


coeffs = st.dictionaries(st.integers(-6, 6), st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                                 allow_infinity=False), max_size=6)


@given(coeffs, coeffs)
def test_linearity_of_residuals(l1, l2):
    w = {3: 1j}     # powers 1..2 stay uncovered
    total = {p: l1.get(p, 0) + l2.get(p, 0) for p in set(l1) | set(l2)}
    bound = 20

    def residual(ell):
        out = solve_coboundary(CoboundaryProblem(ell, w, bound))
        if isinstance(out, Splitting):
            return {}
        return out.residual_cocycle

    r1, r2, r = residual(l1), residual(l2), residual(total)
    for p in set(r1) | set(r2) | set(r):
        assert abs(r.get(p, 0) - r1.get(p, 0) - r2.get(p, 0)) < 1e-8


@given(coeffs)
def test_tangent_weight_never_obstructed(ell):
    out = solve_coboundary(CoboundaryProblem(ell, {-2: -1.0}))
    assert isinstance(out, Splitting) and out.residual < 1e-10


def test_consistency_formulas_match_compose(rng):
    L = 6
    H1 = random_superconformal_n2(rng, L, ("scale", 1.3), degree=2, generators=L - 2)
    H2 = random_superconformal_n2(rng, L, ("inv", 0.7), degree=2, generators=L - 2)
    assert compose(H1, H2).max_difference(consistency_compose(H1, H2)) < 1e-12


def test_sphere_pair_consistency():
    L = 4
    S = make_supersphere(CF.monomial(1, 2, L))
    rep = check_atlas_cocycle(S.atlas())
    assert rep.passed
    assert "pair" in rep.note


def test_torus_generator_cocycle():
    L = 4
    T = make_supertorus(jacobi_type(0.2 + 1.1j, L))
    rep = check_atlas_cocycle(T.atlas())
    assert rep.passed


def test_torus_broken_a_tau_fails():
    L = 4
    tau = 0.2 + 1.1j
    t = jacobi_type(tau, L)
    bad = ThetaType(tau, t.a1, t.a_tau + 0.1, t.b1, t.b_tau)
    atlas = Atlas.torus(tau, lattice_transition_from_type(bad, 1, 0), lattice_transition_from_type(bad, 0, 1))
    rep = check_atlas_cocycle(atlas)
    assert not rep.passed
    assert max(rep.checks["(1,tau) vs (tau,1)"].values()) > 1e-3


def test_torus_b_tau_shift_keeps_generators_commuting():
    # b only enters through a constant phase, so the generators still commute
    L = 4
    tau = 0.2 + 1.1j
    t = jacobi_type(tau, L)
    bad = ThetaType(tau, t.a1, t.a_tau, t.b1, t.b_tau + 0.1)
    atlas = Atlas.torus(tau, lattice_transition_from_type(bad, 1, 0), lattice_transition_from_type(bad, 0, 1))
    assert check_atlas_cocycle(atlas).passed


def test_generic_triple_overlap(rng):
    L = 4
    A = random_superconformal_n2(rng, L, ("scale", 1.2), degree=1, generators=L - 2)
    B = random_superconformal_n2(rng, L, ("scale", 0.9), degree=1, generators=L - 2)
    atlas = Atlas("generic", {("a", "b"): A, ("b", "c"): B, ("a", "c"): compose(A, B)})
    assert check_atlas_cocycle(atlas).passed
    broken = Atlas("generic", {("a", "b"): A, ("b", "c"): B, ("a", "c"): compose(B, A)})
    assert not check_atlas_cocycle(broken).passed


def test_atlas_json_roundtrip():
    L = 4
    S = make_supersphere(CF.monomial(2, -1, L))
    js = S.atlas().to_json()
    back = Atlas.from_json(js)
    assert back.cover == "sphere2"
    assert back.transition("sou", "nor").max_difference(S.transition) == 0
    T = make_supertorus(jacobi_type(1j, L)).atlas()
    back = Atlas.from_json(T.to_json())
    assert back.transitions["tau"].max_difference(T.transitions["tau"]) == 0


def test_atlas_json_rejects_unknown_cover():
    with pytest.raises(SchemaError):
        Atlas.from_json({"cover": "genus2", "transitions": {}})
