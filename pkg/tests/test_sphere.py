import pytest

from superlift.analytic import ComponentFunction as CF
from superlift.errors import BodyVanishes, SuperliftError, OutsideDomain, UnsupportedBody
from superlift.grassmann import GrassmannNumber as G
from superlift.grassmann import gr_invert
from superlift.supermap import N2Map, SuperPoint, check_n2_superconformal, compose, invert
from superlift.sphere import (canonical_sphere, classify_sphere, make_supersphere,
                              mobius_action, sphere_degree, spheres_equivalent, uniformize_sphere)

from conftest import gen, soul_even, soul_odd


def point(rng, L, body=None, gens=3):
    zb = complex(*rng.normal(size=2)) if body is None else body
    z = G.scalar(zb, L) + soul_even(rng, L, generators=gens)
    return SuperPoint(z, (soul_odd(rng, L, generators=gens), soul_odd(rng, L, generators=gens)))


def random_alpha(rng, L):
    a, b, c = [G.scalar(complex(*rng.normal(size=2)), L) + soul_even(rng, L, generators=L - 2, scale=0.2)
               for _ in range(3)]
    d = (1 + b * c) / a
    return ((a, b), (c, d))


def matmul(x, y, L):
    return tuple(tuple(sum((x[i][k] * y[k][j] for k in range(2)), G.zero(L)) for j in range(2))
                 for i in range(2))


def test_I1_on_a_point():
    L = 3
    S = make_supersphere(CF.constant(1, L))
    p = SuperPoint(G.scalar(2, L), (gen(1, L), gen(2, L)))
    q = S.transition.apply(p)
    assert q.z.close_to(G.scalar(0.5, L))
    assert q.thetas[0].close_to(0.5j * gen(1, L)) and q.thetas[1].close_to(0.5j * gen(2, L))


def test_I_z_cubed_components():
    L = 2
    H = make_supersphere(CF.monomial(1, 3, L)).transition
    assert H.g_plus.close_to(CF.monomial(1j, 2, L), 1e-15)
    assert H.g_minus.close_to(CF.monomial(1j, -4, L), 1e-15)
    assert H.f.close_to(CF.monomial(1, -1, L), 0)


def test_vanishing_body_rejected():
    with pytest.raises(BodyVanishes):
        make_supersphere(CF.laurent({0: -1, 1: 1}, 2))


def test_degree_examples():
    L = 4
    assert sphere_degree(make_supersphere(CF.monomial(1, 3, L))) == 3
    rate = G.scalar(0, L) + gen(1, L) * gen(2, L)
    g = CF.monomial(1, 3, L) * CF.exp_affine(1, rate, L)
    assert sphere_degree(make_supersphere(g)) == 3
    assert not spheres_equivalent(make_supersphere(CF.identity(L)), make_supersphere(CF.monomial(1, -1, L)))


def test_degree_additive():
    L = 3
    for m in range(-2, 3):
        for n in range(-2, 3):
            g = CF.laurent({m: 1.0, m - 1: gen(1, L) * gen(2, L)}, L)
            h = CF.laurent({n: 2.0j, n + 2: 0.5 * gen(1, L) * gen(2, L)}, L)
            assert sphere_degree(make_supersphere(g * h)) == m + n


def test_canonical_input_gives_identity_changes():
    L = 4
    for n in (-2, 0, 3):
        res = uniformize_sphere(canonical_sphere(n, L))
        assert res.degree == n and res.residual == 0
        for C in res.chart_changes.values():
            assert C.max_difference(N2Map.identity(L)) < 1e-14


def test_conjugated_S1_is_recovered():
    L = 4
    S = make_supersphere(CF.constant(1, L))
    e = CF.laurent({0: 1.0, 1: gen(1, L) * gen(2, L)}, L)
    C = N2Map.homogeneous(CF.identity(L), CF.zero(L), CF.zero(L), e, e.inverse())
    res = uniformize_sphere(compose(S.transition, invert(C)))
    assert res.degree == 0 and res.residual < 1e-12
    # the nor-chart change undoes the conjugation
    assert res.chart_changes["nor"].max_difference(invert(C)) < 1e-12


def test_psi_plus_perturbation():
    L = 4
    H = make_supersphere(CF.constant(1, L)).transition
    H2 = N2Map.homogeneous(H.f, CF.constant(gen(1, L), L), H.psi_minus, H.g_plus, H.g_minus)
    assert check_n2_superconformal(H2).passed
    res = uniformize_sphere(H2)
    assert res.degree == 0 and res.residual < 1e-12
    assert res.chart_changes["nor"].psi_plus.close_to(CF.monomial(-1j * gen(1, L), 1, L), 1e-13)


def test_unsupported_body():
    L = 2
    H = N2Map.identity(L)
    with pytest.raises(UnsupportedBody):
        uniformize_sphere(H)


def test_canonical_form_exact():
    L = 6
    for n in range(-3, 4):
        H = canonical_sphere(n, L).transition
        assert all(p.is_zero() for p in H.psi)
        assert H.g_plus.close_to(CF.monomial(1j, n - 1, L), 0)
        assert H.g_minus.close_to(CF.monomial(1j, -n - 1, L), 0)
        assert classify_sphere(canonical_sphere(n, L).atlas()) == n


def test_mobius_identity_and_inversion(rng):
    L = 5
    p = point(rng, L)
    one = ((G.scalar(1, L), G.zero(L)), (G.zero(L), G.scalar(1, L)))
    assert mobius_action(2, one, G.scalar(1, L), p).close_to(p)
    S = ((G.zero(L), G.scalar(1, L)), (G.scalar(-1, L), G.zero(L)))
    q = mobius_action(0, S, G.scalar(1, L), p)
    zi = gr_invert(p.z)
    assert q.z.close_to(-zi, 1e-12)
    assert q.thetas[0].close_to(-(p.thetas[0] * zi), 1e-12)
    assert q.thetas[1].close_to(-(p.thetas[1] * zi), 1e-12)


def test_mobius_is_an_action(rng):
    L = 5
    p = point(rng, L)
    for n in (-2, 0, 1, 3):
        a1, a2 = random_alpha(rng, L), random_alpha(rng, L)
        e1 = G.scalar(1.3, L) + soul_even(rng, L, generators=L - 2)
        e2 = G.scalar(0.7j, L)
        lhs = mobius_action(n, matmul(a1, a2, L), e1 * e2, p)
        rhs = mobius_action(n, a1, e1, mobius_action(n, a2, e2, p))
        assert lhs.close_to(rhs, 1e-9)


def test_mobius_commutes_with_transition(rng):
    L = 5
    p = point(rng, L)
    for n in (-2, 0, 3):
        alpha = random_alpha(rng, L)
        eps = G.scalar(1.1, L) + soul_even(rng, L, generators=L - 2)
        I_n = canonical_sphere(n, L).transition
        lhs = mobius_action(n, alpha, eps, I_n.apply(p), "sou")
        rhs = I_n.apply(mobius_action(n, alpha, eps, p, "nor"))
        assert lhs.close_to(rhs, 1e-9)


def test_mobius_chart_swap_and_pole(rng):
    L = 4
    A = ((G.zero(L), G.scalar(1, L)), (G.scalar(-1, L), G.zero(L)))
    chart, q = mobius_action(1, A, G.scalar(1, L), point(rng, L, body=0.0), "nor", return_chart=True)
    assert chart == "sou"
    B = ((G.scalar(1, L), G.zero(L)), (G.scalar(1, L), G.scalar(1, L)))
    with pytest.raises(OutsideDomain):
        mobius_action(1, B, G.scalar(1, L), point(rng, L, body=-1.0), "sou")


def test_alpha_must_have_unit_determinant():
    L = 2
    A = ((G.scalar(2, L), G.zero(L)), (G.zero(L), G.scalar(2, L)))
    with pytest.raises(SuperliftError, match="determinant"):
        mobius_action(0, A, G.scalar(1, L), SuperPoint(G.scalar(1, L), (G.zero(L), G.zero(L))))


def test_structure_json():
    js = canonical_sphere(2, 2).to_json()
    assert js["cover"] == "sphere2" or "transition" in js
