import cmath
import math

import numpy as np
import pytest

from superlift.analytic import ComponentFunction as CF
from superlift.errors import InconsistentType, ParityError, SchemaError, SuperliftError
from superlift.grassmann import GrassmannNumber as G
from superlift.supermap import check_n2_superconformal
from superlift.torus import (ThetaType, is_trivial_type, jacobi_type, make_supertorus, spin_type,
                             spin_structure_torus_n1, supertori_equivalent, trivial_type,
                             types_equivalent, validate_theta_type, zero_type)

from conftest import gen, soul_even

TAU = 0.3 + 1.1j


def random_type(rng, tau, L, chern=None):
    k = int(rng.integers(-3, 4)) if chern is None else chern
    a1 = G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L)
    b1 = G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L)
    bt = G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L)
    return ThetaType(complex(tau), a1, a1 * tau - k, b1, bt), k


def theta(z, tau, terms=30):
    return sum(cmath.exp(1j * math.pi * n * n * tau + 2j * math.pi * n * z) for n in range(-terms, terms + 1))


def test_jacobi_type_against_series():
    L = 2
    T = make_supertorus(jacobi_type(TAU, L))
    assert validate_theta_type(T.theta_type) == 1
    rng = np.random.default_rng(5)
    for z in rng.normal(size=10) + 1j * rng.normal(size=10) * 0.3:
        for m, n in ((1, 0), (0, 1), (2, -1)):
            g = T.transition(m, n).g_plus.value(z).body()
            ratio = theta(z + m + n * TAU, TAU) / theta(z, TAU)
            assert abs(g - ratio) < 1e-6 * max(1, abs(ratio))


def test_trivial_type_example():
    L = 2
    t = trivial_type(TAU, 1, 0, L)
    assert t.a(1, 0).close_to(G.scalar(-1j / math.pi, L), 1e-15)
    assert t.b(0, 1).close_to(G.scalar(-1j / (2 * math.pi) * TAU ** 2, L), 1e-12)
    assert validate_theta_type(t) == 0
    assert is_trivial_type(t)


def test_non_integer_chern_rejected():
    with pytest.raises(InconsistentType):
        validate_theta_type(ThetaType.build(TAU, 0, 0.5, 0, 0, 2))


def test_soul_in_chern_rejected():
    L = 2
    s = gen(1, L) * gen(2, L)
    with pytest.raises(InconsistentType):
        validate_theta_type(ThetaType.build(TAU, 0, s, 0, 0, L))


def test_odd_values_rejected():
    with pytest.raises(ParityError):
        validate_theta_type(ThetaType.build(TAU, gen(1, 2), 0, 0, 0, 2))


def test_spin_type_nontrivial_at_i():
    assert validate_theta_type(spin_type(1j, 2)) == 0
    assert not is_trivial_type(spin_type(1j, 2))


def test_reflexive_equivalence(rng):
    t, _ = random_type(rng, TAU, 4)
    assert types_equivalent(t, t)


def test_trivial_subgroup(rng):
    L = 4
    ts = [trivial_type(TAU, *(G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L) for _ in range(2)), L)
          for _ in range(4)]
    for t in ts:
        assert is_trivial_type(t) and is_trivial_type(-t)
    assert is_trivial_type(ts[0] + ts[1] - ts[2])


def test_shift_by_trivial_is_equivalent(rng):
    L = 4
    t, _ = random_type(rng, TAU, L)
    u = trivial_type(TAU, 0.4 + gen(1, L) * gen(2, L), -1.2j, L)
    assert types_equivalent(t, t + u)
    assert supertori_equivalent(make_supertorus(t), make_supertorus(t + u))
    assert not types_equivalent(jacobi_type(TAU, L), zero_type(TAU, L))


def test_chern_additive(rng):
    L = 4
    for _ in range(20):
        t1, k1 = random_type(rng, TAU, L)
        t2, k2 = random_type(rng, TAU, L)
        assert validate_theta_type(t1 + t2) == k1 + k2


def test_zero_type_gives_pure_translations():
    L = 2
    T = make_supertorus(zero_type(TAU, L))
    H = T.transition(2, 1)
    assert H.f.close_to(CF.laurent({1: 1, 0: 2 + TAU}, L), 1e-14)
    assert H.g_plus.close_to(CF.constant(1, L), 1e-14) and H.g_minus.close_to(CF.constant(1, L), 1e-14)


def test_spin_type_transitions():
    L = 2
    T = make_supertorus(spin_type(1j, L))
    for m, n in ((1, 0), (0, 1), (3, 2), (1, -1)):
        H = T.transition(m, n)
        sign = cmath.exp(1j * math.pi * n)
        assert H.g_plus.close_to(CF.constant(sign, L), 1e-12)
        assert H.g_minus.close_to(CF.constant(1 / sign, L), 1e-12)


def test_cocycle_for_random_types(rng):
    L = 4
    for _ in range(5):
        t, _ = random_type(rng, TAU, L)
        assert make_supertorus(t).check().passed


def test_transitions_superconformal(rng):
    t, _ = random_type(rng, TAU, 4)
    assert check_n2_superconformal(make_supertorus(t).transition(1, 1)).passed


def test_spin_torus_examples():
    L = 2
    sp = spin_structure_torus_n1("nontrivial", TAU, eps=(-1, -1), L=L)
    H = sp.transition(1, 1)
    assert H.f.close_to(CF.laurent({1: 1, 0: 1 + TAU}, L), 1e-14)
    assert H.g.close_to(CF.constant(1, L), 0) and H.psi.is_zero() and H.xi.is_zero()
    z1 = gen(1, L)
    st = spin_structure_torus_n1("trivial", TAU, delta=z1, L=L)
    H = st.transition(0, 1)
    assert H.f.close_to(CF.laurent({1: 1, 0: TAU}, L), 1e-14)
    assert H.xi.close_to(CF.constant(z1, L), 0) and H.psi.close_to(CF.constant(z1, L), 0)
    assert st.check().passed and sp.check().passed


def test_spin_torus_bad_signs():
    with pytest.raises(SuperliftError):
        spin_structure_torus_n1("nontrivial", TAU, eps=(1, 1))


def test_spin_torus_f2_matches_spin_supertorus():
    L = 2
    sp = spin_structure_torus_n1("nontrivial", 1j, eps=(1, -1), L=L)
    T = make_supertorus(spin_type(1j, L))
    for m, n in ((1, 0), (0, 1), (2, 3), (1, -1)):
        assert sp.n2_transition(m, n).max_difference(T.transition(m, n)) < 1e-12


def test_theta_type_json(rng):
    t, _ = random_type(rng, TAU, 3)
    back = ThetaType.from_json(t.to_json())
    assert back.tau == t.tau and all(x.close_to(y, 0) for x, y in zip(back.values(), t.values()))
    with pytest.raises(SchemaError):
        ThetaType.from_json({"tau": {"re": 0, "im": -1}, "a1": 0, "a_tau": 0, "b1": 0, "b_tau": 0})
