"""Superanalytic and superconformal coordinate maps in one even variable.

A superfunction on (1|n) superspace (n = 1 or 2) is written with the odd
coordinates on the left,  F = sum_I theta^I a_I(z),  where each a_I is a
ComponentFunction.  N=2 maps are stored by their defining component data
(f, psi+-, g+-) and expanded to superfunctions by

    z~     = f + th+ g+ psi- + th- g- psi+ + th+ th- (psi+ psi-)'
    theta~+- = psi+- + th+- g+- +- th+ th- (psi+-)'

in homogeneous coordinates.  The nonhomogeneous form uses (psi_1, psi_2,
g_1, g_2) with psi+- = (psi_1 +- i psi_2)/sqrt2 and g+- = g_1 +- i g_2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

from .analytic import ComponentFunction, default_sample_points, require_parity
from .errors import (CoefficientRangeError, NonInvertible, ParityError, SchemaError,
                     UnsupportedComposition, UnsupportedOperation)
from .grassmann import GrassmannNumber, reorder_sign

SQRT2 = math.sqrt(2.0)
CF = ComponentFunction


# superfunctions

class SuperFunction:
    __slots__ = ("n", "L", "terms")

    def __init__(self, n: int, L: int, terms: dict[int, ComponentFunction] | None = None):
        self.n = n
        self.L = L
        clean = {}
        for m, a in (terms or {}).items():
            if a.terms:
                clean[m] = a
        self.terms = clean

    @classmethod
    def const(cls, f: ComponentFunction, n: int) -> "SuperFunction":
        return cls(n, f.L, {0: f})

    @classmethod
    def theta(cls, k: int, n: int, L: int, coeff: ComponentFunction | None = None) -> "SuperFunction":
        return cls(n, L, {1 << k: coeff if coeff is not None else CF.constant(1.0, L)})

    def coeff(self, mask: int) -> ComponentFunction:
        return self.terms.get(mask, CF.zero(self.L))

    def __add__(self, other: "SuperFunction") -> "SuperFunction":
        out = dict(self.terms)
        for m, a in other.terms.items():
            out[m] = out[m] + a if m in out else a
        return SuperFunction(self.n, self.L, out)

    def __neg__(self):
        return SuperFunction(self.n, self.L, {m: -a for m, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def rmul(self, c) -> "SuperFunction":
        """F * c for a theta-free factor c placed on the right."""
        return SuperFunction(self.n, self.L, {m: a * c for m, a in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SuperFunction):
            return self.rmul(other)
        out: dict[int, ComponentFunction] = {}
        for mi, a in self.terms.items():
            a_odd = None
            for mj, b in other.terms.items():
                if mi & mj:
                    continue
                s = reorder_sign(mi, mj)
                if mj.bit_count() & 1:
                    if a_odd is None:
                        a_odd = a.involution()
                    prod = a_odd * b
                else:
                    prod = a * b
                if s < 0:
                    prod = -prod
                m = mi | mj
                out[m] = out[m] + prod if m in out else prod
        return SuperFunction(self.n, self.L, out)

    def d_theta(self, k: int) -> "SuperFunction":
        bit = 1 << k
        out = {}
        for m, a in self.terms.items():
            if m & bit:
                before = (m & (bit - 1)).bit_count()
                out[m ^ bit] = -a if before & 1 else a
        return SuperFunction(self.n, self.L, out)

    def d_z(self) -> "SuperFunction":
        return SuperFunction(self.n, self.L, {m: a.derivative() for m, a in self.terms.items()})

    def D(self, k: int) -> "SuperFunction":
        """Superderivation d/dtheta_k + theta_k' d/dz, k' the partner slot."""
        partner = k if self.n == 1 else 1 - k
        return self.d_theta(k) + SuperFunction.theta(partner, self.n, self.L) * self.d_z()

    def parity_split(self):
        even, odd = {}, {}
        for m, a in self.terms.items():
            e, o = a.even_part(), a.odd_part()
            if m.bit_count() & 1:
                e, o = o, e
            even[m], odd[m] = e, o
        return SuperFunction(self.n, self.L, even), SuperFunction(self.n, self.L, odd)

    def extend(self, L: int) -> "SuperFunction":
        return SuperFunction(self.n, L, {m: a.extend(L) for m, a in self.terms.items()})

    def max_coeff(self) -> float:
        return max((a.max_coeff() for a in self.terms.values()), default=0.0)

    def sample_max(self, points) -> float:
        return max((a.sample_max(points) for a in self.terms.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_coeff() <= tol

    def body_map(self) -> tuple:
        phi = self.coeff(0).body_map()
        if phi is None:
            raise UnsupportedComposition("even coordinate body is not affine or a/z", "compose")
        return phi

    def substitute(self, Z: "SuperFunction", thetas: Sequence["SuperFunction"]) -> "SuperFunction":
        """F(Z, Theta_1, ..., Theta_n) by Taylor expansion of the coefficients."""
        if len(thetas) != self.n:
            raise ValueError("wrong number of odd arguments")
        m_out = Z.n
        phi = Z.body_map()
        base = Z.coeff(0).body()
        nil = Z - SuperFunction.const(base, m_out)
        powers = [SuperFunction.const(CF.constant(1.0, self.L), m_out)]
        while True:
            nxt = powers[-1] * nil
            if not nxt.terms:
                break
            powers.append(nxt)
        out = SuperFunction(m_out, self.L)
        for mask, a in self.terms.items():
            value = SuperFunction(m_out, self.L)
            deriv = a
            for k, pw in enumerate(powers):
                if k:
                    deriv = deriv.derivative()
                value = value + pw.rmul(deriv.compose_body(phi) * (1.0 / math.factorial(k)))
            prefix = SuperFunction.const(CF.constant(1.0, self.L), m_out)
            for k in range(self.n):
                if mask >> k & 1:
                    prefix = prefix * thetas[k]
            out = out + prefix * value
        return out

    def evaluate(self, point: "SuperPoint") -> GrassmannNumber:
        out = GrassmannNumber.zero(point.z.L)
        for mask, a in self.terms.items():
            val = a.eval_at(point.z) if a.L == point.z.L else a.extend(point.z.L).eval_at(point.z)
            prefix = GrassmannNumber.scalar(1.0, point.z.L)
            for k in range(self.n):
                if mask >> k & 1:
                    prefix = prefix * point.thetas[k]
            out = out + prefix * val
        return out

    def __repr__(self):
        names = ["", "t1", "t2", "t1t2"] if self.n == 2 else ["", "t"]
        return " + ".join(f"{names[m]}[{a!r}]" for m, a in sorted(self.terms.items())) or "0"


@dataclass(frozen=True)
class SuperPoint:
    z: GrassmannNumber
    thetas: tuple

    def __post_init__(self):
        if not self.z.is_even():
            raise ParityError("even slot must hold an even Grassmann number")
        for t in self.thetas:
            if not t.is_odd():
                raise ParityError("odd slot must hold an odd Grassmann number")
            if t.L != self.z.L:
                raise ParityError("slots must share one algebra")

    def extend(self, L: int) -> "SuperPoint":
        return SuperPoint(self.z.extend(L), tuple(t.extend(L) for t in self.thetas))

    def close_to(self, other: "SuperPoint", tol: float = 1e-9) -> bool:
        return self.z.close_to(other.z, tol) and all(a.close_to(b, tol) for a, b in zip(self.thetas, other.thetas))

    def to_json(self) -> dict:
        return {"z": self.z.to_json(), "thetas": [t.to_json() for t in self.thetas]}


# maps

def _check_range(funcs, limit: int | None, label: str):
    if limit is None:
        return
    for f in funcs:
        if f.support() >> limit:
            raise CoefficientRangeError(
                f"{label} coefficients must only involve generators 1..{limit}")


class N2Map:
    """N=2 superconformal map stored by component data."""

    __slots__ = ("coords", "f", "psi", "g", "L")

    def __init__(self, f, psi: tuple, g: tuple, coords: str = "homogeneous",
                 coefficient_generators: int | None = None):
        if coords not in ("homogeneous", "nonhomogeneous"):
            raise ValueError(f"unknown coordinate system {coords!r}")
        self.coords = coords
        self.f = require_parity(f, "even", "f")
        self.psi = tuple(require_parity(p, "odd", "psi") for p in psi)
        self.g = tuple(require_parity(x, "even", "g") for x in g)
        self.L = f.L
        for x in self.psi + self.g:
            if x.L != self.L:
                raise ParityError("components live in different algebras")
        _check_range((self.f,) + self.psi + self.g, coefficient_generators, "N=2 map")

    @classmethod
    def homogeneous(cls, f, psi_plus, psi_minus, g_plus, g_minus, **kw) -> "N2Map":
        return cls(f, (psi_plus, psi_minus), (g_plus, g_minus), "homogeneous", **kw)

    @classmethod
    def identity(cls, L: int) -> "N2Map":
        one = CF.constant(1.0, L)
        return cls(CF.identity(L), (CF.zero(L), CF.zero(L)), (one, one))

    @property
    def psi_plus(self):
        return self._h().psi[0]

    @property
    def psi_minus(self):
        return self._h().psi[1]

    @property
    def g_plus(self):
        return self._h().g[0]

    @property
    def g_minus(self):
        return self._h().g[1]

    def _h(self) -> "N2Map":
        return self if self.coords == "homogeneous" else to_homogeneous(self)

    def components(self) -> dict:
        if self.coords == "homogeneous":
            names = ("psi_plus", "psi_minus", "g_plus", "g_minus")
        else:
            names = ("psi_1", "psi_2", "g_1", "g_2")
        return {"f": self.f, **dict(zip(names, self.psi + self.g))}

    def superfunctions(self) -> tuple[SuperFunction, SuperFunction, SuperFunction]:
        """(z~, theta~_1, theta~_2) in this map's own coordinate system."""
        L = self.L
        f = self.f
        t0 = SuperFunction.theta(0, 2, L)
        t1 = SuperFunction.theta(1, 2, L)
        t01 = t0 * t1
        c = SuperFunction.const
        if self.coords == "homogeneous":
            pp, pm = self.psi
            gp, gm = self.g
            Z = c(f, 2) + t0.rmul(gp * pm) + t1.rmul(gm * pp) + t01.rmul((pp * pm).derivative())
            Tp = c(pp, 2) + t0.rmul(gp) + t01.rmul(pp.derivative())
            Tm = c(pm, 2) + t1.rmul(gm) - t01.rmul(pm.derivative())
            return Z, Tp, Tm
        p1, p2 = self.psi
        g1, g2 = self.g
        Z = c(f, 2) + t0.rmul(g1 * p1 + g2 * p2) + t1.rmul(g1 * p2 - g2 * p1) - t01.rmul((p1 * p2).derivative())
        T1 = c(p1, 2) + t0.rmul(g1) - t1.rmul(g2) + t01.rmul(p2.derivative())
        T2 = c(p2, 2) + t0.rmul(g2) + t1.rmul(g1) - t01.rmul(p1.derivative())
        return Z, T1, T2

    def apply(self, point: SuperPoint) -> SuperPoint:
        L = point.z.L
        parts = [s.extend(L) if s.L != L else s for s in self.superfunctions()]
        vals = [s.evaluate(point) for s in parts]
        return SuperPoint(vals[0], (vals[1], vals[2]))

    def extend(self, L: int) -> "N2Map":
        return N2Map(self.f.extend(L), tuple(p.extend(L) for p in self.psi),
                     tuple(x.extend(L) for x in self.g), self.coords)

    def chop(self, tol: float) -> "N2Map":
        return N2Map(self.f.chop(tol), tuple(p.chop(tol) for p in self.psi),
                     tuple(x.chop(tol) for x in self.g), self.coords)

    def max_difference(self, other: "N2Map", points=None) -> float:
        """Largest componentwise gap, symbolic or on sample points."""
        a, b = self._h(), other._h()
        diffs = [a.f - b.f] + [x - y for x, y in zip(a.psi + a.g, b.psi + b.g)]
        if points is None:
            return max(d.max_coeff() for d in diffs)
        return max(d.sample_max(points) for d in diffs)

    def to_json(self) -> dict:
        out = {"kind": "n2", "coords": self.coords}
        for k, v in self.components().items():
            out[k] = v.to_json()
        return out

    @classmethod
    def from_json(cls, data, path: str = "map", L: int | None = None) -> "N2Map":
        if not isinstance(data, dict) or data.get("kind") != "n2":
            raise SchemaError("expected an object with kind 'n2'", path)
        coords = data.get("coords", "homogeneous")
        if coords == "homogeneous":
            names = ("psi_plus", "psi_minus", "g_plus", "g_minus")
        elif coords == "nonhomogeneous":
            names = ("psi_1", "psi_2", "g_1", "g_2")
        else:
            raise SchemaError(f"unknown coordinate system {coords!r}", path + ".coords")
        if "f" not in data:
            raise SchemaError("missing field", path + ".f")
        f = CF.from_json(data["f"], path + ".f", L)
        L = f.L
        comps = []
        for nm in names:
            if nm not in data:
                raise SchemaError("missing field", f"{path}.{nm}")
            comps.append(CF.from_json(data[nm], f"{path}.{nm}", L))
        try:
            return cls(f, tuple(comps[:2]), tuple(comps[2:]), coords)
        except ParityError as exc:
            raise SchemaError(str(exc), path) from None

    def __repr__(self):
        return f"N2Map({self.coords}, {self.components()})"


class N1Map:
    """N=1 superanalytic map (f + theta xi, psi + theta g)."""

    __slots__ = ("f", "xi", "psi", "g", "L", "branch")

    def __init__(self, f, xi, psi, g, branch: str | None = None,
                 coefficient_generators: int | None = None):
        self.f = require_parity(f, "even", "f")
        self.xi = require_parity(xi, "odd", "xi")
        self.psi = require_parity(psi, "odd", "psi")
        self.g = require_parity(g, "even", "g")
        self.L = f.L
        self.branch = branch
        _check_range((self.f, self.xi, self.psi, self.g), coefficient_generators, "N=1 map")

    @classmethod
    def identity(cls, L: int) -> "N1Map":
        return cls(CF.identity(L), CF.zero(L), CF.zero(L), CF.constant(1.0, L))

    def superfunctions(self) -> tuple[SuperFunction, SuperFunction]:
        t = SuperFunction.theta(0, 1, self.L)
        Z = SuperFunction.const(self.f, 1) + t.rmul(self.xi)
        T = SuperFunction.const(self.psi, 1) + t.rmul(self.g)
        return Z, T

    @property
    def superconformal(self) -> bool:
        return check_n1_superconformal(self).passed

    def apply(self, point: SuperPoint) -> SuperPoint:
        L = point.z.L
        Z, T = [s.extend(L) if s.L != L else s for s in self.superfunctions()]
        return SuperPoint(Z.evaluate(point), (T.evaluate(point),))

    def extend(self, L: int) -> "N1Map":
        return N1Map(self.f.extend(L), self.xi.extend(L), self.psi.extend(L), self.g.extend(L), self.branch)

    def max_difference(self, other: "N1Map", points=None) -> float:
        diffs = [self.f - other.f, self.xi - other.xi, self.psi - other.psi, self.g - other.g]
        if points is None:
            return max(d.max_coeff() for d in diffs)
        return max(d.sample_max(points) for d in diffs)

    def components(self) -> dict:
        return {"f": self.f, "xi": self.xi, "psi": self.psi, "g": self.g}

    def to_json(self) -> dict:
        out = {"kind": "n1"}
        for k, v in self.components().items():
            out[k] = v.to_json()
        return out

    @classmethod
    def from_json(cls, data, path: str = "map", L: int | None = None) -> "N1Map":
        if not isinstance(data, dict) or data.get("kind") != "n1":
            raise SchemaError("expected an object with kind 'n1'", path)
        comps = {}
        for nm in ("f", "xi", "psi", "g"):
            if nm not in data:
                raise SchemaError("missing field", f"{path}.{nm}")
            comps[nm] = CF.from_json(data[nm], f"{path}.{nm}", L)
            L = comps[nm].L
        try:
            return cls(**comps)
        except ParityError as exc:
            raise SchemaError(str(exc), path) from None

    def __repr__(self):
        return f"N1Map({self.components()})"


def map_from_json(data, path: str = "map", L: int | None = None):
    kind = data.get("kind") if isinstance(data, dict) else None
    if kind == "n2":
        return N2Map.from_json(data, path, L)
    if kind == "n1":
        return N1Map.from_json(data, path, L)
    raise SchemaError("'kind' must be 'n1' or 'n2'", path + ".kind")


# superconformal condition checks

@dataclass
class ConditionReport:
    passed: bool
    residuals: dict = field(default_factory=dict)
    sampled: dict = field(default_factory=dict)
    scalar_residual: ComponentFunction | None = None
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {"passed": self.passed, "tol": self.tol,
                "residuals": {k: self.residuals[k] for k in sorted(self.residuals)},
                "sampled": {k: self.sampled[k] for k in sorted(self.sampled)}}


def _finish(conds: dict, scalar, tol: float, points) -> ConditionReport:
    residuals = {k: v.max_coeff() for k, v in conds.items()}
    sampled = {k: v.sample_max(points) for k, v in conds.items()}
    residuals["scalar"] = scalar.max_coeff()
    sampled["scalar"] = scalar.sample_max(points)
    passed = all(v < tol for v in sampled.values())
    return ConditionReport(passed, residuals, sampled, scalar, tol)


def scalar_condition(H: N2Map) -> ComponentFunction:
    """(psi+)' psi- - psi+ (psi-)' + g+ g- - f'  (zero iff superconformal)."""
    H = H._h()
    pp, pm = H.psi
    gp, gm = H.g
    return pp.derivative() * pm - pp * pm.derivative() + gp * gm - H.f.derivative()


def check_n2_superconformal(H: N2Map, tol: float = 1e-9, points=None) -> ConditionReport:
    """Apply D+- to the expanded map and collect residuals of every condition."""
    points = default_sample_points() if points is None else points
    Hh = H._h()
    Z, Tp, Tm = Hh.superfunctions()
    conds = {
        "D+theta-": Tm.D(0),
        "D-theta+": Tp.D(1),
        "D+z": Z.D(0) - Tm * Tp.D(0),
        "D-z": Z.D(1) - Tp * Tm.D(1),
    }
    return _finish(conds, scalar_condition(Hh), tol, points)


def check_n1_superconformal(H: N1Map, tol: float = 1e-9, points=None) -> ConditionReport:
    points = default_sample_points() if points is None else points
    Z, T = H.superfunctions()
    conds = {"Dz": Z.D(0) - T * T.D(0)}
    scalar = H.g * H.g - H.f.derivative() - H.psi * H.psi.derivative()
    return _finish(conds, scalar, tol, points)


def _eta_coefficient(delta: GrassmannNumber, eta_bit: int, L: int) -> GrassmannNumber:
    """X with delta = eta * X, eta the highest generator."""
    out = {}
    for m, c in delta.terms.items():
        if m & eta_bit:
            rest = m ^ eta_bit
            out[rest] = -c if rest.bit_count() & 1 else c
    return GrassmannNumber(L, out)


def probe_superderivative(evaluate, point: SuperPoint, k: int) -> list[GrassmannNumber]:
    """D_k of every output of `evaluate` at `point`, through a supertranslation.

    One fresh odd generator eta is adjoined; evaluating at
    (z + eta theta_k', theta_k + eta) and reading off the eta-linear part
    gives d/dtheta_k + theta_k' d/dz without any symbolic differentiation.
    """
    L = point.z.L
    Lx = L + 1
    eta = GrassmannNumber.generator(Lx, Lx)
    p = point.extend(Lx)
    n = len(p.thetas)
    partner = k if n == 1 else 1 - k
    thetas = list(p.thetas)
    shifted = SuperPoint(p.z + eta * thetas[partner], tuple(
        t + eta if j == k else t for j, t in enumerate(thetas)))
    base = evaluate(p)
    moved = evaluate(shifted)
    bit = 1 << (Lx - 1)
    return [_eta_coefficient(b - a, bit, Lx).extend(L) for a, b in zip(base, moved)]


def pointwise_n2_residual(H: N2Map, point: SuperPoint) -> float:
    """Residual of D+-theta~-+ = 0 and D+-z~ = theta~-+ D+-theta~+- at one point."""
    Hh = H._h()

    def ev(p):
        q = Hh.apply(p)
        return [q.z, q.thetas[0], q.thetas[1]]
    val = ev(point)
    worst = 0.0
    for k in (0, 1):
        dz, dp, dm = probe_superderivative(ev, point, k)
        same, other = (dp, dm) if k == 0 else (dm, dp)
        worst = max(worst, other.max_abs())
        partner_val = val[2] if k == 0 else val[1]
        worst = max(worst, (dz - partner_val * same).max_abs())
    return worst


# composition and inversion

def _triple(H):
    return H.superfunctions()


def _from_triple(parts, like):
    if isinstance(like, N1Map):
        Z, T = parts
        return N1Map(Z.coeff(0), Z.coeff(1), T.coeff(0), T.coeff(1))
    Z, Tp, Tm = parts
    return N2Map(Z.coeff(0), (Tp.coeff(0), Tm.coeff(0)), (Tp.coeff(1), Tm.coeff(2)))


def compose_superfunctions(outer_parts, inner_parts):
    Z = inner_parts[0]
    thetas = inner_parts[1:]
    return tuple(F.substitute(Z, thetas) for F in outer_parts)


def compose(H1, H2):
    """H1 o H2 (H2 applied first)."""
    if type(H1) is not type(H2):
        raise UnsupportedComposition("maps of different kinds", "compose")
    if isinstance(H1, N2Map):
        coords = H1.coords
        a, b = H1._h(), H2._h()
        out = _from_triple(compose_superfunctions(_triple(a), _triple(b)), a)
        return to_nonhomogeneous(out) if coords == "nonhomogeneous" else out
    return _from_triple(compose_superfunctions(_triple(H1), _triple(H2)), H1)


def _inverse_body(phi: tuple) -> tuple:
    if phi[0] == "affine":
        a, b = complex(phi[1]), complex(phi[2])
        return ("affine", 1.0 / a, -b / a)
    return phi


def _phi_function(phi: tuple, L: int) -> ComponentFunction:
    if phi[0] == "affine":
        return CF.laurent({1: phi[1], 0: phi[2]}, L)
    return CF.monomial(phi[1], -1, L)


def invert(H):
    """Inverse map: exact body inverse, then soul corrections by fixed-point sweeps."""
    coords = getattr(H, "coords", None)
    Hh = H._h() if isinstance(H, N2Map) else H
    parts = _triple(Hh)
    n = len(parts) - 1
    L = Hh.L
    phi = parts[0].body_map()
    psi_inv = _inverse_body(phi)
    g_body = [Hh.g[k].body() for k in range(n)] if isinstance(Hh, N2Map) else [Hh.g.body()]
    try:
        g_inv = [gb.inverse().compose_body(psi_inv) for gb in g_body]
    except UnsupportedOperation as exc:
        raise NonInvertible(f"fibre scaling has no inverse: {exc}", "invert") from None
    # H0: body-level part, so H = H0 + N with N nilpotent
    h0 = [SuperFunction.const(_phi_function(phi, L), n)] + [
        SuperFunction.theta(k, n, L, g_body[k]) for k in range(n)]
    nil = [p - q for p, q in zip(parts, h0)]
    h0_inv = [SuperFunction.const(_phi_function(psi_inv, L), n)] + [
        SuperFunction.theta(k, n, L, g_inv[k]) for k in range(n)]
    ident = [SuperFunction.const(CF.identity(L), n)] + [SuperFunction.theta(k, n, L) for k in range(n)]
    K = tuple(h0_inv)
    for _ in range(L + 4):
        corr = compose_superfunctions(nil, K)
        rhs = [i - c for i, c in zip(ident, corr)]
        new = compose_superfunctions(h0_inv, rhs)
        if all((a - b).max_coeff() == 0 for a, b in zip(new, K)):
            K = new
            break
        K = new
    out = _from_triple(K, Hh)
    if coords == "nonhomogeneous":
        return to_nonhomogeneous(out)
    return out


# coordinate systems

def to_homogeneous(H: N2Map) -> N2Map:
    if H.coords == "homogeneous":
        return H
    p1, p2 = H.psi
    g1, g2 = H.g
    return N2Map(H.f, ((p1 + p2 * 1j) * (1 / SQRT2), (p1 - p2 * 1j) * (1 / SQRT2)),
                 (g1 + g2 * 1j, g1 - g2 * 1j), "homogeneous")


def to_nonhomogeneous(H: N2Map) -> N2Map:
    if H.coords == "nonhomogeneous":
        return H
    pp, pm = H.psi
    gp, gm = H.g
    return N2Map(H.f, ((pp + pm) * (1 / SQRT2), (pp - pm) * (-1j / SQRT2)),
                 ((gp + gm) * 0.5, (gp - gm) * (-0.5j)), "nonhomogeneous")


# N=1 <-> N=2 functors

def f1_functor(H: N2Map, check: bool = True, tol: float = 1e-9) -> N1Map:
    """(f + psi+ psi- + 2 theta g+ psi-, psi+ + theta g+)."""
    Hh = H._h()
    if check and not check_n2_superconformal(Hh, tol).passed:
        raise NonInvertible("F1 needs an N=2 superconformal input", "f1_functor")
    pp, pm = Hh.psi
    gp = Hh.g[0]
    return N1Map(Hh.f + pp * pm, gp * pm * 2.0, pp, gp)


def f2_functor(H: N1Map) -> N2Map:
    try:
        ginv = H.g.inverse()
    except UnsupportedOperation as exc:
        raise NonInvertible(f"g is not invertible: {exc}", "f2_functor") from None
    half = H.xi * ginv * 0.5
    f = H.f - H.psi * half
    g_minus = H.f.derivative() * ginv - H.psi.derivative() * H.xi * ginv * ginv
    return N2Map(f, (H.psi, half), (H.g, g_minus))


def build_n1_superconformal(f: ComponentFunction, psi: ComponentFunction, branch: str = "principal") -> N1Map:
    """Map (f + theta g psi, psi + theta g) with g^2 = f' + psi psi'."""
    require_parity(f, "even", "f")
    require_parity(psi, "odd", "psi")
    g = (f.derivative() + psi * psi.derivative()).sqrt(branch)
    return N1Map(f, g * psi, psi, g, branch=branch)


# random generators used by tests and demos

def random_superconformal_n2(rng, L: int, body: tuple = ("scale", 1.0), degree: int = 4,
                             generators: int | None = None, soul_scale: float = 0.3,
                             poly_only: bool = False) -> N2Map:
    """Random homogeneous superconformal map with Laurent soul data.

    body = ('scale', a) gives f_B = a z, ('inv', a) gives f_B = a/z; g- is
    solved from the scalar condition so the output is exactly superconformal
    up to rounding.
    """
    from .grassmann import random_grassmann
    top = L if generators is None else generators
    lo = 0 if poly_only else -degree

    def soul_fn(parity):
        coeffs = {}
        for p in range(lo, degree + 1):
            if rng.random() < 0.5:
                coeffs[p] = random_grassmann(rng, L, parity, density=0.4, body=False,
                                             generators=top, scale=soul_scale)
        return CF.laurent(coeffs, L)

    kind, a = body
    # |g+ body| in [0.5, 2] keeps g- = f'/g+ of order one
    unit = rng.uniform(0.5, 2.0) * cmath.exp(2j * math.pi * rng.random())
    if kind == "scale":
        fb = CF.monomial(a, 1, L)
        gp_body = CF.constant(unit, L)
    else:
        fb = CF.monomial(a, -1, L)
        gp_body = CF.monomial(unit, int(rng.integers(-2, 3)), L)
    f = fb + soul_fn("even")
    gp = gp_body + soul_fn("even")
    pp, pm = soul_fn("odd"), soul_fn("odd")
    gm = (f.derivative() - pp.derivative() * pm + pp * pm.derivative()) * gp.inverse()
    return N2Map(f, (pp, pm), (gp, gm))
