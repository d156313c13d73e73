"""Two-chart superspheres over the Riemann sphere.

The transition runs from the northern chart (coordinate z) to the southern
chart (coordinate w = 1/z).  Canonical structures are

    I_g(z, th+, th-) = (1/z, i th+ g(z)/z, i th- / (z g(z)))

and the integer invariant is the winding degree of the body of g.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .analytic import ComponentFunction, winding_degree
from .cech import Atlas, CoboundaryProblem, Obstruction, body_laurent, solve_coboundary
from .errors import (BodyVanishes, Obstructed, OutsideDomain, SuperliftError,
                     UnsupportedBody, UnsupportedOperation)
from .grassmann import BODY_TOL, GrassmannNumber, gr_int_pow, gr_invert, level_key
from .supermap import (N2Map, SuperPoint, compose, invert)

log = logging.getLogger(__name__)
CF = ComponentFunction


@dataclass
class SphereStructure:
    transition: N2Map
    degree: int | None = None

    @property
    def L(self) -> int:
        return self.transition.L

    def atlas(self) -> Atlas:
        return Atlas.sphere(self.transition)

    def to_json(self) -> dict:
        return Atlas.sphere(self.transition).to_json()


def _monomial_body(f: CF) -> tuple[complex, int] | None:
    """(c, n) when the body of f is c z^n, else None."""
    if not f.is_laurent():
        return None
    body = body_laurent(f)
    if len(body) != 1:
        return None
    (p, c), = body.items()
    return c, p


def _check_nonvanishing(g: CF):
    if g.is_laurent() or len(g.rates()) == 1:
        # a Laurent polynomial without zeros on C^x is a monomial
        rate = g.rates()[0] if g.rates() else 0j
        body = {p: a.body() for p, a in g.terms.get(rate, {}).items() if a.body() != 0}
        if len(body) != 1:
            raise BodyVanishes("body of g has a zero on the punctured plane", "make_supersphere")
        return
    for r in (0.5, 1.0, 2.0):
        winding_degree(lambda z, r=r: g.body_values(r * np.asarray(z)))


def make_supersphere(g: CF) -> SphereStructure:
    _check_nonvanishing(g)
    L = g.L
    try:
        ginv = g.inverse()
    except UnsupportedOperation as exc:
        raise UnsupportedBody(f"cannot invert g: {exc}", "make_supersphere") from None
    zinv = CF.monomial(1j, -1, L)
    H = N2Map.homogeneous(CF.monomial(1.0, -1, L), CF.zero(L), CF.zero(L), zinv * g, zinv * ginv)
    return SphereStructure(H)


def canonical_sphere(n: int, L: int) -> SphereStructure:
    return SphereStructure(make_supersphere(CF.monomial(1.0, n, L)).transition, degree=n)


def _g_of(H: N2Map) -> CF:
    """g with g+ = i g / z."""
    return CF.monomial(-1j, 1, H.L) * H.g_plus


def sphere_degree(S) -> int:
    H = S.transition if isinstance(S, SphereStructure) else S
    g = _g_of(H)
    return winding_degree(g)


def spheres_equivalent(S1, S2) -> bool:
    return sphere_degree(S1) == sphere_degree(S2)


# uniformization pipeline

@dataclass
class UniformizationResult:
    degree: int
    chart_changes: dict              # chart -> N2Map acting on that chart
    canonical: SphereStructure
    residual: float                  # |C_sou o H o C_nor^-1 - I_{z^n}|
    stages: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"degree": self.degree, "residual": self.residual,
                "chart_changes": {k: v.to_json() for k, v in sorted(self.chart_changes.items())},
                "canonical": self.canonical.to_json(), "stages": self.stages}


def _poly(coeffs_by_mask: dict, L: int) -> CF:
    """sum over masks of b_mask(z) zeta_mask."""
    out: dict = {}
    for mask, poly in coeffs_by_mask.items():
        for p, c in poly.items():
            term = out.setdefault(p, GrassmannNumber.zero(L))
            out[p] = term + GrassmannNumber(L, {mask: c})
    return CF.laurent(out, L)


def _masks_of_length(f: CF, k: int) -> list[int]:
    return sorted((m for m in f.masks() if bin(m).count("1") == k), key=level_key)


def _split_level(funcs_weights, k: int, L: int, tol: float, stage: str):
    """Solve every level of length k for each (function, weight) pair."""
    nor_parts, sou_parts = [], []
    for f, weight in funcs_weights:
        bn, bs = {}, {}
        for mask in _masks_of_length(f, k):
            ell = {p: c for p, c in f.level(mask).items() if abs(c) > tol}
            if not ell:
                continue
            sol = solve_coboundary(CoboundaryProblem(ell, weight))
            if isinstance(sol, Obstruction):
                raise Obstructed(f"{stage}: level {mask:#b} is not a coboundary", sol)
            bn[mask], bs[mask] = sol.b_nor, sol.b_sou
        nor_parts.append(_poly(bn, L))
        sou_parts.append(_poly(bs, L))
    return nor_parts, sou_parts


def _odd_shift(bp: CF, bm: CF) -> N2Map:
    """(z, th) -> (z + ..., th+ + bp, th- + bm) with f = z, g+ = 1."""
    L = bp.L
    one = CF.constant(1.0, L)
    gm = one - bp.derivative() * bm + bp * bm.derivative()
    return N2Map.homogeneous(CF.identity(L), bp, bm, one, gm)


def _even_shift(b: CF) -> N2Map:
    """(z + b, th+ (1 + b'), th-)."""
    L = b.L
    one = CF.constant(1.0, L)
    return N2Map.homogeneous(CF.identity(L) + b, CF.zero(L), CF.zero(L), one + b.derivative(), one)


def _fibre_scale(e: CF) -> N2Map:
    L = e.L
    return N2Map.homogeneous(CF.identity(L), CF.zero(L), CF.zero(L), e, e.inverse())


def _conjugate(H, C_nor, C_sou):
    return compose(C_sou, compose(H, invert(C_nor)))


def uniformize_sphere(atlas, tol: float = 1e-9, chop: float = 1e-13) -> UniformizationResult:
    H = atlas.transition("sou", "nor") if isinstance(atlas, Atlas) else (
        atlas.transition if isinstance(atlas, SphereStructure) else atlas)
    H = H._h()
    H_in = H
    L = H.L
    body_f = _monomial_body(H.f)
    if body_f is None or body_f[1] != -1 or abs(body_f[0] - 1) > BODY_TOL:
        raise UnsupportedBody("transition body must be z -> 1/z", "uniformize_sphere")
    gp_body, gm_body = _monomial_body(H.g_plus), _monomial_body(H.g_minus)
    if gp_body is None or gm_body is None:
        raise UnsupportedBody("fibre body must be a monomial c z^k", "uniformize_sphere")
    w_plus = {gp_body[1]: gp_body[0]}
    w_minus = {gm_body[1]: gm_body[0]}
    ident = N2Map.identity(L)
    C_nor, C_sou = ident, ident
    stages = []

    def apply(cn, cs, label, k):
        nonlocal H, C_nor, C_sou
        H = _conjugate(H, cn, cs).chop(chop)
        C_nor, C_sou = compose(cn, C_nor), compose(cs, C_sou)
        stages.append({"stage": label, "length": k})
        log.debug("%s at length %d done", label, k)

    # (1) odd levels of psi+-
    for k in range(1, L + 1, 2):
        (bn_p, bn_m), (bs_p, bs_m) = _split_level(
            [(H.psi_plus, w_plus), (H.psi_minus, w_minus)], k, L, chop, "psi-kill")
        if all(b.is_zero() for b in (bn_p, bn_m, bs_p, bs_m)):
            continue
        apply(_odd_shift(bn_p, bn_m), _odd_shift(bs_p, bs_m), "psi-kill", k)

    # (2) even levels of soul(f), tangent weight f'_B = -1/z^2
    for k in range(2, L + 1, 2):
        (bn,), (bs,) = _split_level([(H.f, {-2: -1.0})], k, L, chop, "f-kill")
        if bn.is_zero() and bs.is_zero():
            continue
        apply(_even_shift(bn), _even_shift(bs), "f-kill", k)

    # (3) fibre: g = c z^n u with u of body 1; split log u into chart pieces
    g = _g_of(H)
    c, n = _monomial_body(g)
    u = g * CF.monomial(1.0 / c, -n, L)
    h = u.log_unit().chop(chop)
    h_nor = CF.laurent({p: a for p, a in h.laurent_coeffs().items() if p >= 0}, L)
    h_sou = CF.laurent({-p: a for p, a in h.laurent_coeffs().items() if p < 0}, L)
    if not (h.is_zero() and abs(c - 1) <= BODY_TOL):
        eps_nor = h_nor.exp() * c
        eps_sou = (-h_sou).exp()
        apply(_fibre_scale(eps_nor), _fibre_scale(eps_sou), "g-kill", 0)

    canonical = canonical_sphere(n, L)
    reached = _conjugate(H_in, C_nor, C_sou)
    residual = reached.max_difference(canonical.transition)
    stages.append({"stage": "check", "residual": residual})
    if residual > tol:
        raise SuperliftError(f"pipeline residual {residual:.3g} above {tol}", "uniformize_sphere")
    return UniformizationResult(n, {"nor": C_nor, "sou": C_sou}, canonical, residual, stages)


def classify_sphere(atlas) -> int:
    return uniformize_sphere(atlas).degree


# SL(2) x GL(1) action on S^2C(z^n)

def _as_grassmann(x, L: int) -> GrassmannNumber:
    return x if isinstance(x, GrassmannNumber) else GrassmannNumber.scalar(complex(x), L)


def _check_alpha(alpha, eps, L: int, tol: float = 1e-9):
    (a, b), (c, d) = [[_as_grassmann(x, L) for x in row] for row in alpha]
    eps = _as_grassmann(eps, L)
    for x in (a, b, c, d, eps):
        if not x.is_even():
            from .errors import ParityError
            raise ParityError("matrix entries and scaling must be even", "mobius_action")
    det = a * d - b * c
    if not det.close_to(GrassmannNumber.scalar(1.0, L), tol):
        raise SuperliftError("matrix must have determinant 1", "mobius_action")
    if abs(eps.body()) < BODY_TOL:
        from .errors import ZeroBody
        raise ZeroBody("scaling must be invertible", "mobius_action")
    return a, b, c, d, eps


def _act(num, den_for_f, den, p: SuperPoint, eps, n: int, phase: complex) -> SuperPoint:
    z = num * gr_invert(den_for_f)
    tp, tm = p.thetas
    L = z.L
    s = GrassmannNumber.scalar(phase, L)
    return SuperPoint(z, (s * tp * eps * gr_int_pow(den, n - 1),
                          s * tm * gr_invert(eps) * gr_int_pow(den, -n - 1)))


def mobius_action(n: int, alpha, eps, p: SuperPoint, chart: str = "sou",
                  return_chart: bool = False):
    """alpha ._n p on S^2C(z^n); p given in `chart` coordinates.

    Points sent to the other chart (the two exceptional cases at the poles)
    come back in that chart's coordinates; `return_chart` reports which.
    """
    L = p.z.L
    a, b, c, d, eps = _check_alpha(alpha, eps, L)
    z = p.z
    zb = z.body()
    if chart == "sou":
        den = c * z + d
        if abs(den.body()) > BODY_TOL:
            out, where = _act(a * z + b, den, den, p, eps, n, 1.0), "sou"
        elif abs(d.body()) < BODY_TOL and abs(zb) < BODY_TOL:
            den2 = a * z + b
            out, where = _act(c * z + d, den2, den2, p, eps, n, -1j), "nor"
        else:
            raise OutsideDomain("point is sent to the pole of this chart", "mobius_action")
    elif chart == "nor":
        den = a + b * z
        if abs(den.body()) > BODY_TOL:
            out, where = _act(c + d * z, den, den, p, eps, n, 1.0), "nor"
        elif abs(a.body()) < BODY_TOL and abs(zb) < BODY_TOL:
            den2 = c + d * z
            out, where = _act(a + b * z, den2, den2, p, eps, n, 1j), "sou"
        else:
            raise OutsideDomain("point is sent to the pole of this chart", "mobius_action")
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return (where, out) if return_chart else out

