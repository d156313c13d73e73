import pytest

from superlift.analytic import ComponentFunction as CF
from superlift.analytic import default_sample_points
from superlift.errors import NoSquareRoot, NonInvertible, ParityError, UnsupportedComposition
from superlift.grassmann import GrassmannNumber, random_grassmann
from superlift.supermap import (N1Map, N2Map, SuperFunction, SuperPoint, build_n1_superconformal,
                                check_n1_superconformal, check_n2_superconformal, compose,
                                f1_functor, f2_functor, invert, map_from_json,
                                pointwise_n2_residual, random_superconformal_n2, to_homogeneous,
                                to_nonhomogeneous)

from conftest import gen, soul_even, soul_odd

POINTS = default_sample_points(32)


def I_of(g: CF) -> N2Map:
    # (1/z, i theta+ g / z, i theta- / (z g))
    L = g.L
    zinv = CF.monomial(1, -1, L)
    zero = CF.zero(L)
    g_plus = (zinv * g) * 1j
    g_minus = (zinv * g.inverse()) * 1j
    return N2Map.homogeneous(zinv, zero, zero, g_plus, g_minus)


def random_point(rng, L, gens=None):
    z = GrassmannNumber.scalar(complex(*rng.normal(size=2)) + 1.5, L) + soul_even(rng, L, generators=gens)
    return SuperPoint(z, (soul_odd(rng, L, generators=gens), soul_odd(rng, L, generators=gens)))


def test_identity_is_superconformal():
    rep = check_n2_superconformal(N2Map.identity(3))
    assert rep.passed and all(v == 0 for v in rep.residuals.values())


def test_I_z_squared_passes_and_broken_one_fails():
    L = 2
    H = I_of(CF.monomial(1, 2, L))
    assert check_n2_superconformal(H).passed
    gp, gm = H.g
    bad = N2Map.homogeneous(H.f, *H.psi, gp, gm * 2)
    rep = check_n2_superconformal(bad)
    assert not rep.passed
    # scalar residual is g+ g- - f' = -1/z^2
    assert rep.scalar_residual.close_to(CF.monomial(-1, -2, L), 1e-14)


def test_invert_I1():
    L = 2
    Hi = invert(I_of(CF.constant(1, L)))
    assert Hi.f.close_to(CF.monomial(1, -1, L), 1e-14)
    assert Hi.g[0].close_to(CF.monomial(-1j, -1, L), 1e-14)
    assert Hi.g[1].close_to(CF.monomial(-1j, -1, L), 1e-14)


def test_compose_fibre_scalings(rng):
    L = 4
    a = [CF.laurent({0: 1 + soul_even(rng, L), 1: soul_even(rng, L)}, L) for _ in range(4)]
    z, zero = CF.identity(L), CF.zero(L)
    H1 = N2Map.homogeneous(z, zero, zero, a[0], a[1])
    H2 = N2Map.homogeneous(z, zero, zero, a[2], a[3])
    H = compose(H1, H2)
    assert H.g[0].close_to(a[0] * a[2], 1e-13) and H.g[1].close_to(a[1] * a[3], 1e-13)


def test_compose_rejects_mixed_kinds():
    with pytest.raises(UnsupportedComposition):
        compose(N2Map.identity(2), N1Map.identity(2))


def test_compose_matches_pointwise_application(rng):
    L = 6
    H1 = random_superconformal_n2(rng, L, ("scale", 1.3), degree=2, generators=L - 2)
    H2 = random_superconformal_n2(rng, L, ("inv", 0.7), degree=2, generators=L - 2)
    H = compose(H1, H2)
    for _ in range(3):
        p = random_point(rng, L, gens=L - 2)
        assert H.apply(p).close_to(H1.apply(H2.apply(p)), 1e-8)
        assert pointwise_n2_residual(H, p) < 1e-8


def test_invert_round_trip(rng):
    L = 5
    for body in (("scale", 0.8), ("inv", 1.4)):
        H = random_superconformal_n2(rng, L, body, degree=2, generators=L - 2)
        Hi = invert(H)
        assert compose(H, Hi).max_difference(N2Map.identity(L), POINTS) < 1e-9
        assert compose(Hi, H).max_difference(N2Map.identity(L), POINTS) < 1e-9


def test_coordinate_conversion_involutive(rng):
    L = 5
    H = random_superconformal_n2(rng, L, degree=2, generators=L - 2)
    back = to_homogeneous(to_nonhomogeneous(H))
    assert back.max_difference(H) < 1e-13
    Hn = to_nonhomogeneous(H)
    assert Hn.coords == "nonhomogeneous"
    assert check_n2_superconformal(Hn).passed
    assert to_nonhomogeneous(N2Map.identity(2)).max_difference(N2Map.identity(2)) == 0


def test_nonhomogeneous_component_formulas(rng):
    L = 4
    H = random_superconformal_n2(rng, L, degree=1, generators=L - 2)
    Hn = to_nonhomogeneous(H)
    pp, pm = H.psi
    gp, gm = H.g
    s = 2 ** -0.5
    assert Hn.psi[0].close_to((pp + pm) * s, 1e-14)
    assert Hn.psi[1].close_to((pp - pm) * (-1j * s), 1e-14)
    # psi+- = (psi1 +- i psi2)/sqrt2 and g+- = g1 +- i g2
    assert ((Hn.psi[0] + Hn.psi[1] * 1j) * s).close_to(pp, 1e-14)
    assert (Hn.g[0] + Hn.g[1] * 1j).close_to(gp, 1e-14)


def test_super_derivations_anticommute_to_two_d_dz(rng):
    L = 4
    terms = {m: CF.laurent({p: random_grassmann(rng, L, "even" if m in (0, 3) else "odd", body=m in (0, 3))
                            for p in range(-2, 3)}, L) for m in range(4)}
    F = SuperFunction(2, L, terms)
    lhs = F.D(1).D(0) + F.D(0).D(1)
    rhs = F.d_z().rmul(CF.constant(2, L))
    assert (lhs - rhs).max_coeff() < 1e-12


def test_superderivative_chain_rule(rng):
    L = 6
    H = random_superconformal_n2(rng, L, degree=2, generators=L - 2)
    Z, Tp, Tm = H.superfunctions()
    terms = {0: CF.laurent({0: 0.3, 2: 1.0}, L), 1: CF.laurent({1: gen(1, L)}, L),
             2: CF.laurent({0: gen(2, L)}, L), 3: CF.laurent({1: 0.5}, L)}
    F = SuperFunction(2, L, terms)
    G = F.substitute(Z, (Tp, Tm))
    for k, T in ((0, Tp), (1, Tm)):
        lhs = G.D(k)
        rhs = T.D(k) * F.D(k).substitute(Z, (Tp, Tm))
        assert (lhs - rhs).sample_max(POINTS) < 1e-9


def test_build_n1_examples():
    L = 2
    z = CF.identity(L)
    assert build_n1_superconformal(z, CF.zero(L)).max_difference(N1Map.identity(L)) == 0
    z1 = CF.constant(gen(1, L), L)
    H = build_n1_superconformal(z, z1)
    assert H.xi.close_to(z1, 0) and H.psi.close_to(z1, 0) and H.g.close_to(CF.constant(1, L), 0)
    assert check_n1_superconformal(H).passed
    with pytest.raises(NoSquareRoot):
        build_n1_superconformal(CF.monomial(1, 2, L), CF.zero(L))


def test_parity_violating_map_rejected():
    # (z + theta, theta) puts an even constant in the odd slot
    L = 2
    with pytest.raises(ParityError):
        N1Map(CF.identity(L), CF.constant(1, L), CF.zero(L), CF.constant(1, L))


def test_f2_example():
    L = 2
    z1 = CF.constant(gen(1, L), L)
    H = f2_functor(N1Map(CF.identity(L), CF.zero(L), z1, CF.constant(1, L)))
    assert H.f.close_to(CF.identity(L), 0)
    assert H.psi_plus.close_to(z1, 0) and H.psi_minus.is_zero()
    assert H.g_plus.close_to(CF.constant(1, L), 0) and H.g_minus.close_to(CF.constant(1, L), 0)
    assert check_n2_superconformal(H).passed


def test_functors_on_identity():
    assert f1_functor(N2Map.identity(2)).max_difference(N1Map.identity(2)) == 0
    assert f2_functor(N1Map.identity(2)).max_difference(N2Map.identity(2)) == 0


def test_f1_rejects_non_superconformal():
    L = 2
    H = I_of(CF.constant(1, L))
    bad = N2Map.homogeneous(H.f, *H.psi, H.g[0], H.g[1] * 3)
    with pytest.raises(NonInvertible):
        f1_functor(bad)


def test_f2_needs_invertible_g():
    L = 2
    H = N1Map(CF.identity(L), CF.zero(L), CF.zero(L), CF.laurent({0: 1, 1: -1}, L))
    with pytest.raises(NonInvertible):
        f2_functor(H)


def test_coefficient_range_enforced(rng):
    from superlift.errors import CoefficientRangeError
    L = 4
    z = CF.identity(L)
    psi = CF.constant(gen(4, L), L)
    with pytest.raises(CoefficientRangeError):
        N2Map.homogeneous(z, psi, CF.zero(L), CF.constant(1, L), CF.constant(1, L),
                          coefficient_generators=L - 2)


def test_json_roundtrip(rng):
    L = 4
    H = random_superconformal_n2(rng, L, degree=2, generators=L - 2)
    assert map_from_json(H.to_json()).max_difference(H) == 0
    N = f1_functor(H)
    assert map_from_json(N.to_json()).max_difference(N) == 0
    Hn = to_nonhomogeneous(H)
    back = map_from_json(Hn.to_json())
    assert back.coords == "nonhomogeneous" and back.max_difference(Hn) == 0
