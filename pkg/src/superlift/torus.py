"""Supertori over C / (Z + Z tau) built from theta-function types.

A type is stored by its values on the lattice generators 1 and tau:

    a_{m+n tau} = m a_1 + n a_tau
    b_{g1+g2}   = b_{g1} + b_{g2} + a_{g1} g2        (mod Z on the body)

and the supertorus has generator transitions

    H_g(z, th+, th-) = (z + g, th+ e^{2 pi i (a_g z + b_g)}, th- e^{-2 pi i (a_g z + b_g)}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass


from .analytic import ComponentFunction
from .cech import Atlas, CocycleReport, check_atlas_cocycle
from .errors import InconsistentType, ParityError, SchemaError, SuperliftError
from .grassmann import GrassmannNumber
from .supermap import N1Map, N2Map, f2_functor

CF = ComponentFunction
TYPE_TOL = 1e-9
TWO_PI_I = 2j * math.pi


def _g(x, L: int) -> GrassmannNumber:
    return GrassmannNumber.coerce(x, L)


@dataclass(frozen=True)
class ThetaType:
    tau: complex
    a1: GrassmannNumber
    a_tau: GrassmannNumber
    b1: GrassmannNumber
    b_tau: GrassmannNumber

    @classmethod
    def build(cls, tau, a1=0, a_tau=0, b1=0, b_tau=0, L: int = 2) -> "ThetaType":
        return cls(complex(tau), _g(a1, L), _g(a_tau, L), _g(b1, L), _g(b_tau, L))

    @property
    def L(self) -> int:
        return self.a1.L

    def values(self):
        return self.a1, self.a_tau, self.b1, self.b_tau

    def __add__(self, other: "ThetaType") -> "ThetaType":
        if abs(self.tau - other.tau) > TYPE_TOL:
            raise InconsistentType("types live on different lattices", "theta_type")
        return ThetaType(self.tau, *(x + y for x, y in zip(self.values(), other.values())))

    def __neg__(self) -> "ThetaType":
        return ThetaType(self.tau, *(-x for x in self.values()))

    def __sub__(self, other: "ThetaType") -> "ThetaType":
        return self + (-other)

    def extend(self, L: int) -> "ThetaType":
        return ThetaType(self.tau, *(x.extend(L) for x in self.values()))

    def a(self, m: int, n: int) -> GrassmannNumber:
        return self.a1 * m + self.a_tau * n

    def b(self, m: int, n: int) -> GrassmannNumber:
        """b on m + n tau, extended from the generators through (1,1), (tau,tau), (m, n tau)."""
        t = self.tau
        bm = self.b1 * m + self.a1 * (m * (m - 1) / 2)
        bn = self.b_tau * n + self.a_tau * (t * n * (n - 1) / 2)
        return bm + bn + self.a1 * (m * n * t)

    def chern_value(self) -> GrassmannNumber:
        return self.a1 * self.tau - self.a_tau

    def to_json(self) -> dict:
        return {"tau": {"re": self.tau.real, "im": self.tau.imag},
                "a1": self.a1.to_json(), "a_tau": self.a_tau.to_json(),
                "b1": self.b1.to_json(), "b_tau": self.b_tau.to_json()}

    @classmethod
    def from_json(cls, data, L: int | None = None) -> "ThetaType":
        if not isinstance(data, dict):
            raise SchemaError("expected a theta-type object", "type")
        tau = _complex_from_json(data.get("tau"), "type.tau")
        if tau.imag <= 0:
            raise SchemaError("Im tau must be positive", "type.tau")
        if L is None:
            L = data.get("L")
            if L is None:
                Ls = [v["L"] for v in (data.get(k) for k in ("a1", "a_tau", "b1", "b_tau"))
                      if isinstance(v, dict) and isinstance(v.get("L"), int)]
                L = max(Ls, default=2)
        vals = []
        for k in ("a1", "a_tau", "b1", "b_tau"):
            v = data.get(k, 0)
            path = f"type.{k}"
            if isinstance(v, dict) and "terms" not in v:
                vals.append(GrassmannNumber.scalar(_complex_from_json(v, path), L))
            else:
                g = GrassmannNumber.from_json(v, path, None if isinstance(v, dict) else L)
                vals.append(g.extend(L) if g.L < L else g)
        return cls(tau, *vals)


def _complex_from_json(v, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, dict):
        try:
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        except (TypeError, ValueError):
            raise SchemaError("'re'/'im' must be numbers", path) from None
    raise SchemaError("expected a number or {re, im}", path)


# named types

def jacobi_type(tau: complex, L: int = 2) -> ThetaType:
    """Type of sum_n exp(pi i n^2 tau + 2 pi i n z)."""
    return ThetaType.build(tau, 0, -1, 0, -tau / 2, L)


def spin_type(tau: complex, L: int = 2) -> ThetaType:
    return ThetaType.build(tau, 0, 0, 0, 0.5, L)


def zero_type(tau: complex, L: int = 2) -> ThetaType:
    return ThetaType.build(tau, 0, 0, 0, 0, L)


def trivial_type(tau: complex, a, b, L: int = 2) -> ThetaType:
    """Type of exp(a z^2 + b z + c)."""
    a, b = _g(a, L), _g(b, L)
    k = -1j / math.pi
    h = -1j / (2 * math.pi)
    return ThetaType(complex(tau), a * k, a * (k * tau), (b + a) * h, (b * tau + a * (tau * tau)) * h)


# checks

def _near_int(x: float, tol: float) -> bool:
    return abs(x - round(x)) <= tol


def validate_theta_type(t: ThetaType, tol: float = TYPE_TOL) -> int:
    """Chern integer body(a_1 tau - a_tau); raises InconsistentType."""
    if t.tau.imag <= 0:
        raise InconsistentType("Im tau must be positive", "validate_theta_type")
    for x in t.values():
        if not x.is_even():
            raise ParityError("type values must be even", "validate_theta_type")
    # b_{1+tau} computed along (1, tau) and along (tau, 1)
    via_1_tau = t.b1 + t.b_tau + t.a1 * t.tau
    via_tau_1 = t.b_tau + t.b1 + t.a_tau
    gap = via_1_tau - via_tau_1
    if gap.soul().max_abs() > tol:
        raise InconsistentType("b relation fails on the soul for (1,tau) vs (tau,1)",
                               "validate_theta_type")
    c = gap.body()
    if abs(c.imag) > tol or not _near_int(c.real, tol):
        raise InconsistentType(f"a_1 tau - a_tau = {c:.6g} is not an integer", "validate_theta_type")
    # the (1,1) and (tau,tau) relations hold by construction of b; recheck them anyway
    for (m1, n1), (m2, n2) in (((1, 0), (1, 0)), ((0, 1), (0, 1))):
        lhs = t.b(m1 + m2, n1 + n2)
        rhs = t.b(m1, n1) + t.b(m2, n2) + t.a(m1, n1) * (m2 + n2 * t.tau)
        d = lhs - rhs
        if d.soul().max_abs() > tol or abs(d.body().imag) > tol or not _near_int(d.body().real, tol):
            raise InconsistentType("b relation fails on a diagonal pair", "validate_theta_type")
    return int(round(c.real))


def _lattice_coords(x: complex, tau: complex) -> tuple[float, float]:
    """Real (j, k) with x = j + k tau."""
    k = x.imag / tau.imag
    return x.real - k * tau.real, k


def is_trivial_type(t: ThetaType, tol: float = TYPE_TOL) -> bool:
    validate_theta_type(t, tol)
    # a_gamma linear in gamma through a single a
    if (t.a_tau - t.a1 * t.tau).max_abs() > tol:
        return False
    r = t.b_tau - t.b1 * t.tau - t.a1 * ((t.tau * t.tau - t.tau) / 2)
    if r.soul().max_abs() > tol:
        return False
    j, k = _lattice_coords(r.body(), t.tau)
    return _near_int(j, tol) and _near_int(k, tol)


def types_equivalent(t1: ThetaType, t2: ThetaType, tol: float = TYPE_TOL) -> bool:
    if t1.L != t2.L:
        L = max(t1.L, t2.L)
        t1, t2 = t1.extend(L), t2.extend(L)
    return is_trivial_type(t1 - t2, tol)


# supertori

def _fibre_factor(t: ThetaType, m: int, n: int, sign: int) -> CF:
    L = t.L
    expo = CF.laurent({1: t.a(m, n) * (sign * TWO_PI_I), 0: t.b(m, n) * (sign * TWO_PI_I)}, L)
    return expo.exp()


def lattice_transition_from_type(t: ThetaType, m: int, n: int, L: int | None = None) -> N2Map:
    if L is not None and L != t.L:
        t = t.extend(L)
    L = t.L
    gamma = m + n * t.tau
    shift = CF.laurent({1: 1.0, 0: gamma}, L)
    zero = CF.zero(L)
    return N2Map.homogeneous(shift, zero, zero, _fibre_factor(t, m, n, 1), _fibre_factor(t, m, n, -1))


@dataclass
class TorusStructure:
    theta_type: ThetaType
    h1: N2Map
    h_tau: N2Map
    chern: int

    @property
    def tau(self) -> complex:
        return self.theta_type.tau

    def atlas(self) -> Atlas:
        return Atlas.torus(self.tau, self.h1, self.h_tau, self.theta_type)

    def transition(self, m: int, n: int) -> N2Map:
        return lattice_transition_from_type(self.theta_type, m, n)

    def check(self, tol: float = 1e-9, points=None) -> CocycleReport:
        return check_atlas_cocycle(self.atlas(), tol, points)


def make_supertorus(t: ThetaType, tol: float = TYPE_TOL) -> TorusStructure:
    chern = validate_theta_type(t, tol)
    return TorusStructure(t, lattice_transition_from_type(t, 1, 0),
                          lattice_transition_from_type(t, 0, 1), chern)


def supertori_equivalent(T1: TorusStructure, T2: TorusStructure, tol: float = TYPE_TOL) -> bool:
    return types_equivalent(T1.theta_type, T2.theta_type, tol)


# N=1 tori with spin structure

SPIN_SIGNS = ((1, -1), (-1, 1), (-1, -1))


@dataclass
class SpinTorus:
    kind: str
    tau: complex
    b: GrassmannNumber
    eps: tuple | None = None
    delta: GrassmannNumber | None = None

    @property
    def L(self) -> int:
        return self.b.L

    def transition(self, m: int, n: int) -> N1Map:
        L = self.L
        shift = CF.laurent({1: 1.0, 0: self.b * n + m}, L)
        zero = CF.zero(L)
        if self.kind == "nontrivial":
            e1, e2 = self.eps
            return N1Map(shift, zero, zero, CF.constant(float(e1 ** m * e2 ** n), L))
        d = CF.constant(self.delta * n, L)
        return N1Map(shift, d, d, CF.constant(1.0, L))

    def atlas(self) -> Atlas:
        return Atlas.torus(self.tau, self.transition(1, 0), self.transition(0, 1))

    def check(self, tol: float = 1e-9, points=None) -> CocycleReport:
        return check_atlas_cocycle(self.atlas(), tol, points)

    def n2_transition(self, m: int, n: int) -> N2Map:
        return f2_functor(self.transition(m, n))


def spin_structure_torus_n1(kind: str, tau: complex, eps=None, b=None, delta=None,
                            L: int = 2, tol: float = 1e-9) -> SpinTorus:
    """kind 'nontrivial' takes eps = (e1, e2); kind 'trivial' takes delta (odd)."""
    tau = complex(tau)
    b = _g(tau if b is None else b, L)
    if abs(b.body() - tau) > tol:
        raise SuperliftError("body of b must equal tau", "spin_structure_torus_n1")
    if kind == "nontrivial":
        eps = tuple(int(e) for e in (eps if eps is not None else (-1, -1)))
        if eps not in SPIN_SIGNS:
            raise SuperliftError(f"invalid sign pair {eps}", "spin_structure_torus_n1")
        out = SpinTorus(kind, tau, b, eps=eps)
    elif kind == "trivial":
        delta = _g(0 if delta is None else delta, L)
        if not delta.is_zero() and not delta.is_odd():
            raise ParityError("delta must be odd", "spin_structure_torus_n1")
        out = SpinTorus(kind, tau, b, delta=delta)
    else:
        raise SuperliftError(f"unknown spin structure {kind!r}", "spin_structure_torus_n1")
    report = out.check(tol)
    if not report.passed:
        raise SuperliftError("generator transitions do not commute", "spin_structure_torus_n1")
    return out
