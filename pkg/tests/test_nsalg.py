from fractions import Fraction

import pytest
import sympy
from sympy.polys.domains import QQ_I

from superlift.errors import ParityError, SuperliftError
from superlift.grassmann import GrassmannNumber as G
from superlift.nsalg import (FAMILIES, SQRT2_FIELD, SuperDerivation, change_domain, loop_exponential,
                             loop_exponential_operator, make_generator, nonhomogeneous_to_homogeneous,
                             super_bracket, verify_ns_relations)
from superlift.supermap import N2Map, check_n2_superconformal, compose

from conftest import soul_even

I = QQ_I.from_sympy(sympy.I)


def q(x):
    if isinstance(x, complex):
        return QQ_I.convert(Fraction(x.real).limit_denominator()) + I * QQ_I.convert(Fraction(x.imag).limit_denominator())
    return QQ_I.convert(Fraction(x))


def combo(coords, terms):
    out = None
    for kind, n, c in terms:
        if c == 0:
            continue
        t = make_generator(kind, n, coords).scale(q(c))
        out = t if out is None else out + t
    return out


# relations written independently as (kind, index, coefficient) lists; odd indices
# are r = n - 1/2, so G_{m+r} has label m + n and L_{r+s} has label n + n' - 1
def bracket_table(ka, a, kb, b):
    r, s = Fraction(2 * a - 1, 2), Fraction(2 * b - 1, 2)
    even = {"L", "J"}
    if ka in even and kb in even:
        return {("L", "L"): [("L", a + b, a - b)], ("L", "J"): [("J", a + b, -b)],
                ("J", "L"): [("J", a + b, a)], ("J", "J"): []}[(ka, kb)]
    if ka == "L":
        return [(kb, a + b, Fraction(a, 2) - s)]
    if ka == "J":
        return {"G1": [("G2", a + b, -1j)], "G2": [("G1", a + b, 1j)],
                "G": [("G*", a + b, -1j)], "G*": [("G", a + b, 1j)],
                "G+": [("G+", a + b, 1)], "G-": [("G-", a + b, -1)]}[kb]
    if kb in even:
        return [(k, n, -c) for k, n, c in bracket_table(kb, b, ka, a)]
    t = a + b - 1
    if ka == kb and ka in ("G+", "G-"):
        return []
    if ka == kb:
        return [("L", t, 2)]
    if (ka, kb) in (("G1", "G2"), ("G", "G*")):
        return [("J", t, complex(0, -float(r - s)))]
    if (ka, kb) in (("G2", "G1"), ("G*", "G")):
        return [("J", t, complex(0, -float(s - r)))]
    if (ka, kb) == ("G+", "G-"):
        return [("L", t, 2), ("J", t, r - s)]
    return [("L", t, 2), ("J", t, s - r)]


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_brackets_against_table(family):
    coords, kinds = FAMILIES[family]
    for ka in kinds:
        for kb in kinds:
            for a in range(-2, 3):
                for b in range(-2, 3):
                    got = super_bracket(make_generator(ka, a, coords), make_generator(kb, b, coords))
                    want = combo(coords, bracket_table(ka, a, kb, b))
                    if want is None:
                        assert got.is_zero(), (ka, a, kb, b)
                    else:
                        assert got.coeffs == want.coeffs, (ka, a, kb, b)


def test_verify_counts():
    assert verify_ns_relations("n1", 2).checked == 55
    rep = verify_ns_relations("n1", 3)
    assert rep.passed and rep.checked == 105


def test_unknown_family():
    with pytest.raises(SuperliftError):
        verify_ns_relations("n3", 1)


def test_generator_shapes():
    # L_n = -z^{n+1} d_z - (n+1)/2 z^n theta d_theta on N=1
    L2 = make_generator("L", 2, "n1")
    assert L2.coeffs[0] == {(3, 0): QQ_I.convert(-1)}
    assert L2.coeffs[1] == {(2, 1): QQ_I.convert(Fraction(-3, 2))}
    G0 = make_generator("G", 0, "n1")
    assert G0.parity == 1
    assert G0.coeffs == ({(0, 1): QQ_I.one}, {(0, 0): -QQ_I.one})


def test_generators_act_on_polynomials():
    # L_{-1} = -d_z
    Lm1 = make_generator("L", -1, "n1")
    h = {(3, 0): QQ_I.one}
    assert Lm1.apply(h) == {(2, 0): QQ_I.convert(-3)}


def test_parity_checked():
    with pytest.raises(ParityError):
        SuperDerivation("n1", ({(0, 1): QQ_I.one}, {}), 0)


def test_homogeneous_basis_from_conversion():
    F = SQRT2_FIELD
    inv_root2 = F.from_sympy(1 / sympy.sqrt(2))
    iF = F.from_sympy(sympy.I)
    for n in range(-3, 4):
        for kind in ("L", "J"):
            a = nonhomogeneous_to_homogeneous(make_generator(kind, n, "n2-nonhomogeneous"))
            assert a.coeffs == change_domain(make_generator(kind, n, "n2-homogeneous"), F).coeffs
        g1 = change_domain(make_generator("G1", n, "n2-nonhomogeneous"), F)
        g2 = change_domain(make_generator("G2", n, "n2-nonhomogeneous"), F)
        gp = nonhomogeneous_to_homogeneous(g1 - g2.scale(iF)).scale(inv_root2)
        gm = nonhomogeneous_to_homogeneous(g1 + g2.scale(iF)).scale(inv_root2)
        assert gp.coeffs == change_domain(make_generator("G+", n, "n2-homogeneous"), F).coeffs
        assert gm.coeffs == change_domain(make_generator("G-", n, "n2-homogeneous"), F).coeffs


def random_loop_data(rng, L):
    A = {n: soul_even(rng, L) for n in range(-2, 3) if rng.random() < 0.6}
    a0 = G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L, generators=L - 2)
    return A, a0


def test_loop_exponential_identity():
    assert loop_exponential({}, 1.0, 4).max_difference(N2Map.identity(4)) == 0


def test_loop_exponential_routes_agree(rng):
    L = 6
    for _ in range(10):
        A, a0 = random_loop_data(rng, L)
        H = loop_exponential(A, a0, L)
        assert H.max_difference(loop_exponential_operator(A, a0, L)) == 0
        assert check_n2_superconformal(H, 1e-12).passed


def test_loop_exponential_is_a_homomorphism(rng):
    L = 5
    A, a = random_loop_data(rng, L)
    B, b = random_loop_data(rng, L)
    AB = {n: A.get(n, G.zero(L)) + B.get(n, G.zero(L)) for n in set(A) | set(B)}
    lhs = compose(loop_exponential(A, a, L), loop_exponential(B, b, L))
    assert lhs.max_difference(loop_exponential(AB, a * b, L)) < 1e-12


def test_operator_route_needs_soul_coefficients():
    L = 2
    with pytest.raises(SuperliftError):
        loop_exponential_operator({1: G.scalar(1.0, L)}, 1.0, L)
