"""Superderivation representations of the Neveu-Schwarz algebras (c = 0).

Coefficients live in Laurent polynomials in z tensored with the exterior
algebra on the odd coordinates, with exact Gaussian-rational scalars.  A
derivation X = sum_a X^a d_a acts with left derivatives, and brackets use

    [X, Y]^b = X(Y^b) - (-1)^{|X||Y|} Y(X^b).

Odd generators G_{n - 1/2} are indexed by the integer n throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import sympy
from sympy.polys.domains import QQ, QQ_I

from .analytic import ComponentFunction
from .errors import NonInvertible, ParityError, SuperliftError
from .grassmann import BODY_TOL, GrassmannNumber, gr_invert, reorder_sign
from .supermap import N2Map, SuperFunction

CF = ComponentFunction

COORDS = {"n1": 1, "n2-nonhomogeneous": 2, "n2-homogeneous": 2}
KINDS = {
    "n1": ("L", "G", "J", "G*"),
    "n2-nonhomogeneous": ("L", "J", "G1", "G2"),
    "n2-homogeneous": ("L", "J", "G+", "G-"),
}
FAMILIES = {
    "n1": ("n1", ("L", "G")),
    "n2-nonhomogeneous": ("n2-nonhomogeneous", ("L", "J", "G1", "G2")),
    "n1-extended": ("n1", ("L", "G", "J", "G*")),
    "n2-homogeneous": ("n2-homogeneous", ("L", "J", "G+", "G-")),
}
ODD_KINDS = {"G", "G*", "G1", "G2", "G+", "G-"}


# coefficient ring: {(power, theta mask): scalar}

def _clean(d: dict, K) -> dict:
    return {k: v for k, v in d.items() if v != K.zero}


def ring_mul(p: dict, q: dict, K) -> dict:
    out: dict = {}
    for (e1, m1), c1 in p.items():
        for (e2, m2), c2 in q.items():
            if m1 & m2:
                continue
            s = reorder_sign(m1, m2)
            key = (e1 + e2, m1 | m2)
            term = c1 * c2 if s > 0 else -(c1 * c2)
            out[key] = out[key] + term if key in out else term
    return _clean(out, K)


def ring_add(p: dict, q: dict, K, scale=None) -> dict:
    out = dict(p)
    for k, v in q.items():
        v = v if scale is None else scale * v
        out[k] = out[k] + v if k in out else v
    return _clean(out, K)


def ring_parity(p: dict) -> int | None:
    pars = {bin(m).count("1") % 2 for (_, m) in p}
    return pars.pop() if len(pars) == 1 else (None if pars else 0)


def _d(p: dict, slot: int, K) -> dict:
    """Left derivative: slot 0 is d/dz, slot k >= 1 is d/dtheta_k."""
    out: dict = {}
    if slot == 0:
        for (e, m), c in p.items():
            if e:
                out[(e - 1, m)] = c * K.convert(e)
        return out
    bit = 1 << (slot - 1)
    for (e, m), c in p.items():
        if m & bit:
            before = bin(m & (bit - 1)).count("1")
            out[(e, m ^ bit)] = -c if before & 1 else c
    return out


@dataclass(frozen=True)
class SuperDerivation:
    coords: str
    coeffs: tuple          # one ring element per slot (d_z, d_theta_1, ...)
    parity: int
    domain: object = field(default=QQ_I, compare=False)

    def __post_init__(self):
        for k, c in enumerate(self.coeffs):
            p = ring_parity(c)
            if p is None:
                raise ParityError("coefficient of mixed parity", "make_generator")
            slot_parity = 0 if k == 0 else 1
            if c and (p + slot_parity) % 2 != self.parity:
                raise ParityError("coefficient parity does not match the derivation", "make_generator")

    @property
    def n_odd(self) -> int:
        return len(self.coeffs) - 1

    def apply(self, h: dict) -> dict:
        K = self.domain
        out: dict = {}
        for slot, c in enumerate(self.coeffs):
            if c:
                out = ring_add(out, ring_mul(c, _d(h, slot, K), K), K)
        return out

    def __add__(self, other: "SuperDerivation") -> "SuperDerivation":
        _same(self, other)
        return SuperDerivation(self.coords, tuple(ring_add(a, b, self.domain) for a, b in
                                                  zip(self.coeffs, other.coeffs)),
                               self.parity if any(self.coeffs) else other.parity, self.domain)

    def scale(self, c) -> "SuperDerivation":
        K = self.domain
        c = K.convert(c) if not isinstance(c, type(K.one)) else c
        return SuperDerivation(self.coords, tuple(_clean({k: c * v for k, v in p.items()}, K)
                                                  for p in self.coeffs), self.parity, K)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_sympy(self) -> dict:
        names = ["z"] + [f"theta{k}" for k in range(1, self.n_odd + 1)]
        K = self.domain
        return {f"d/d{names[s]}": {f"z^{e} th{m:b}": str(K.to_sympy(c)) for (e, m), c in sorted(p.items())}
                for s, p in enumerate(self.coeffs) if p}

    def __repr__(self):
        return f"SuperDerivation({self.coords}, {self.to_sympy()})"


def _same(X, Y):
    if X.coords != Y.coords:
        raise SuperliftError("derivations use different coordinates", "super_bracket")


def super_bracket(X: SuperDerivation, Y: SuperDerivation) -> SuperDerivation:
    _same(X, Y)
    K = X.domain
    c = K.one if (X.parity and Y.parity) else -K.one
    out = [ring_add(X.apply(Y.coeffs[b]), Y.apply(X.coeffs[b]), K, scale=c)
           for b in range(len(X.coeffs))]
    return SuperDerivation(X.coords, tuple(out), (X.parity + Y.parity) % 2, K)


# generators

def _mono(K, c, e: int, mask: int = 0) -> dict:
    c = K.convert(c) if not isinstance(c, type(K.one)) else c
    return {} if c == K.zero else {(e, mask): c}


def _q(K, x) -> object:
    """Exact scalar from int / Fraction / complex with rational parts."""
    if isinstance(x, Fraction):
        return K.convert(x)
    if isinstance(x, complex):
        re, im = Fraction(x.real).limit_denominator(10 ** 6), Fraction(x.imag).limit_denominator(10 ** 6)
        return K.convert(re) + K.convert(im) * K.from_sympy(sympy.I)
    return K.convert(x)


def make_generator(kind: str, n: int, coords: str, domain=QQ_I) -> SuperDerivation:
    """L_n, J_n, or an odd generator G_{n - 1/2} in the given coordinates."""
    if coords not in COORDS:
        raise SuperliftError(f"unknown coordinate system {coords!r}", "make_generator")
    if kind not in KINDS[coords]:
        raise SuperliftError(f"generator {kind!r} does not exist in {coords} coordinates", "make_generator")
    K = domain
    I = K.from_sympy(sympy.I)
    one = K.one
    half = K.convert(Fraction(n + 1, 2))
    m = lambda c, e, mask=0: _mono(K, c, e, mask)
    add = lambda *ps: _sum(K, ps)
    if coords == "n1":
        # slots: d_z, d_theta   (theta = bit 1)
        if kind == "L":
            return SuperDerivation(coords, (m(-one, n + 1), m(-half, n, 1)), 0, K)
        if kind == "G":
            return SuperDerivation(coords, (m(one, n, 1), m(-one, n)), 1, K)
        if kind == "J":
            return SuperDerivation(coords, ({}, m(one, n, 1)), 0, K)
        return SuperDerivation(coords, (m(I, n, 1), m(I, n)), 1, K)     # G*
    # two odd coordinates: theta_1 = bit 1, theta_2 = bit 2; theta_1 theta_2 = mask 3
    if kind == "L":
        return SuperDerivation(coords, (m(-one, n + 1), m(-half, n, 1), m(-half, n, 2)), 0, K)
    if coords == "n2-nonhomogeneous":
        if kind == "J":
            return SuperDerivation(coords, ({}, m(-I, n, 2), m(I, n, 1)), 0, K)
        if kind == "G1":
            return SuperDerivation(coords, (m(one, n, 1), m(-one, n), m(K.convert(n), n - 1, 3)), 1, K)
        return SuperDerivation(coords, (m(one, n, 2), m(K.convert(-n), n - 1, 3), m(-one, n)), 1, K)
    # homogeneous: theta+ = bit 1, theta- = bit 2
    if kind == "J":
        return SuperDerivation(coords, ({}, m(-one, n, 1), m(one, n, 2)), 0, K)
    if kind == "G+":
        return SuperDerivation(coords, (m(one, n, 2), add(m(-one, n), m(K.convert(-n), n - 1, 3)), {}), 1, K)
    return SuperDerivation(coords, (m(one, n, 1), {}, add(m(-one, n), m(K.convert(n), n - 1, 3))), 1, K)


def _sum(K, polys) -> dict:
    out: dict = {}
    for p in polys:
        out = ring_add(out, p, K)
    return out


SQRT2_FIELD = QQ.algebraic_field(sympy.sqrt(2), sympy.I)


def change_domain(X: SuperDerivation, K) -> SuperDerivation:
    lift = lambda c: K.from_sympy(X.domain.to_sympy(c))
    return SuperDerivation(X.coords, tuple({k: lift(v) for k, v in p.items()} for p in X.coeffs),
                           X.parity, K)


def nonhomogeneous_to_homogeneous(X: SuperDerivation) -> SuperDerivation:
    """Rewrite a derivation in (z, th1, th2) in terms of th+- = (th1 +- i th2)/sqrt 2.

    The result lives over Q(sqrt 2, i).
    """
    if X.coords != "n2-nonhomogeneous":
        raise SuperliftError("expects nonhomogeneous coordinates", "nonhomogeneous_to_homogeneous")
    F = SQRT2_FIELD
    X = change_domain(X, F)
    r2 = F.from_sympy(1 / sympy.sqrt(2))
    i = F.from_sympy(sympy.I)
    # theta_1 = (th+ + th-)/sqrt2, theta_2 = -i (th+ - th-)/sqrt2
    th = {1: {(0, 1): r2, (0, 2): r2}, 2: {(0, 1): -i * r2, (0, 2): i * r2}}

    def subst(p: dict) -> dict:
        out: dict = {}
        for (e, mask), c in p.items():
            term = {(e, 0): c}
            for k in (1, 2):
                if mask & (1 << (k - 1)):
                    term = ring_mul(term, th[k], F)
            out = ring_add(out, term, F)
        return out

    cz, c1, c2 = (subst(p) for p in X.coeffs)
    # d/dth+ = (d_1 - i d_2)/sqrt2 ... so X^1 d_1 + X^2 d_2 = (X^1 + i X^2)/sqrt2 d+ + (X^1 - i X^2)/sqrt2 d-
    cp = ring_add({k: v * r2 for k, v in c1.items()}, {k: v * i * r2 for k, v in c2.items()}, F)
    cm = ring_add({k: v * r2 for k, v in c1.items()}, {k: -(v * i * r2) for k, v in c2.items()}, F)
    return SuperDerivation("n2-homogeneous", (cz, cp, cm), X.parity, F)


# structure constants (c = 0, d = 0)

def _r(n: int) -> Fraction:
    return Fraction(2 * n - 1, 2)


def structure_constants(family: str, A: tuple, B: tuple) -> dict:
    """Expected [A, B] as {(kind, n): coefficient}; A, B are (kind, n)."""
    ka, na = A
    kb, nb = B
    I = 1j
    odd_a, odd_b = ka in ODD_KINDS, kb in ODD_KINDS
    if odd_a and not odd_b:
        return {k: -v for k, v in structure_constants(family, B, A).items()}
    if not odd_a and not odd_b:
        if ka == "L" and kb == "L":
            return {("L", na + nb): Fraction(na - nb)}
        if ka == "L" and kb == "J":
            return {("J", na + nb): Fraction(-nb)}
        if ka == "J" and kb == "L":
            return {("J", na + nb): Fraction(na)}
        return {}
    if not odd_a and odd_b:
        s = _r(nb)
        target = na + nb
        if ka == "L":
            return {(kb, target): Fraction(na, 2) - s}
        # J acting on odd generators
        rot = {"G": ("G*", -I), "G*": ("G", I), "G1": ("G2", -I), "G2": ("G1", I)}
        if kb in rot:
            k, c = rot[kb]
            return {(k, target): c}
        return {(kb, target): Fraction(1 if kb == "G+" else -1)}
    r, s = _r(na), _r(nb)
    tot = int(r + s)
    pair = (ka, kb)
    if ka == kb and ka not in ("G+", "G-"):
        return {("L", tot): Fraction(2)}
    mixed = {("G", "G*"), ("G1", "G2")}
    if pair in mixed:
        return {("J", tot): -I * (r - s)}
    if (kb, ka) in mixed:
        return {("J", tot): -I * (s - r)}
    if pair == ("G+", "G-"):
        return {("L", tot): Fraction(2), ("J", tot): r - s}
    if pair == ("G-", "G+"):
        return {("L", tot): Fraction(2), ("J", tot): s - r}
    return {}


@dataclass
class RelationReport:
    family: str
    max_n: int
    checked: int
    mismatches: list

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"family": self.family, "max_n": self.max_n, "checked": self.checked,
                "mismatches": self.mismatches, "passed": self.passed}


def expected_derivation(family: str, combo: dict, coords: str, cache: dict) -> SuperDerivation:
    n_slots = COORDS[coords] + 1
    out = SuperDerivation(coords, tuple({} for _ in range(n_slots)), 0)
    for (kind, n), c in combo.items():
        if c == 0:
            continue
        g = cache.setdefault((kind, n), make_generator(kind, n, coords))
        term = g.scale(_q(QQ_I, c if isinstance(c, complex) else Fraction(c)))
        out = term if out.is_zero() else out + term
    return out


def verify_ns_relations(family: str, max_n: int = 3) -> RelationReport:
    if family not in FAMILIES:
        raise SuperliftError(f"unknown family {family!r}", "verify_ns_relations")
    coords, kinds = FAMILIES[family]
    cache: dict = {}
    gens = [(k, n) for k in kinds for n in range(-max_n, max_n + 1)]
    for g in gens:
        cache[g] = make_generator(g[0], g[1], coords)
    mismatches = []
    checked = 0
    for A, B in combinations_with_replacement(gens, 2):
        checked += 1
        got = super_bracket(cache[A], cache[B])
        want = expected_derivation(family, structure_constants(family, A, B), coords, cache)
        if got.coeffs != want.coeffs:
            mismatches.append({"pair": [f"{A[0]}[{A[1]}]", f"{B[0]}[{B[1]}]"],
                               "computed": got.to_sympy(), "expected": want.to_sympy()})
    return RelationReport(family, max_n, checked, mismatches)


# GL(1) loop group

def _coerce_coeffs(A: dict, L: int) -> dict:
    out = {}
    for n, a in A.items():
        a = GrassmannNumber.coerce(a, L)
        if not (a.is_even() or a.is_zero()):
            raise ParityError("loop coefficients must be even", "loop_exponential")
        out[int(n)] = a
    return out


def loop_exponential(A: dict, a0, L: int | None = None) -> N2Map:
    """(z, th+ a0 e^{sum A_n z^n}, th- a0^-1 e^{-sum A_n z^n})."""
    L = L if L is not None else _infer_L(A, a0)
    a0 = GrassmannNumber.coerce(a0, L)
    if not a0.is_even() or abs(a0.body()) < BODY_TOL:
        raise NonInvertible("a0 must be even with nonzero body", "loop_exponential")
    A = _coerce_coeffs(A, L)
    h = CF.laurent(A, L)
    gp = h.exp() * a0
    gm = (-h).exp() * gr_invert(a0)
    zero = CF.zero(L)
    return N2Map.homogeneous(CF.identity(L), zero, zero, gp, gm)


def _infer_L(A: dict, a0) -> int:
    for x in list(A.values()) + [a0]:
        if isinstance(x, GrassmannNumber):
            return x.L
    raise SuperliftError("cannot infer generator count", "loop_exponential")


def loop_exponential_operator(A: dict, a0, L: int | None = None) -> N2Map:
    """Same transformation from the truncated series of exp(-sum A_n J_n) on coordinates.

    Needs soul-valued A_n, so that the series terminates; a0 acts through
    the diagonal a0^{-J_0} scaling.
    """
    L = L if L is not None else _infer_L(A, a0)
    a0 = GrassmannNumber.coerce(a0, L)
    if not a0.is_even() or abs(a0.body()) < BODY_TOL:
        raise NonInvertible("a0 must be even with nonzero body", "loop_exponential_operator")
    A = _coerce_coeffs(A, L)
    if any(abs(a.body()) > 0 for a in A.values()):
        raise SuperliftError("the operator series terminates only for soul-valued A_n",
                             "loop_exponential_operator")
    h = CF.laurent(A, L)
    tp = SuperFunction.theta(0, 2, L)
    tm = SuperFunction.theta(1, 2, L)

    def X(F: SuperFunction) -> SuperFunction:
        # -sum A_n J_n = h (th+ d+ - th- d-)
        return (tp * F.d_theta(0) - tm * F.d_theta(1)).rmul(h)

    def series(F: SuperFunction) -> SuperFunction:
        total, term, k = F, F, 0
        powers = [F]
        while True:
            term = X(term)
            k += 1
            if term.is_zero():
                break
            powers.append(term)
        total = powers[0]
        for j, P in enumerate(powers[1:], start=1):
            total = total + P.rmul(CF.constant(1.0 / math.factorial(j), L))
        return total

    Tp = series(tp).rmul(CF.constant(a0, L))
    Tm = series(tm).rmul(CF.constant(gr_invert(a0), L))
    zero = CF.zero(L)
    return N2Map.homogeneous(CF.identity(L), zero, zero, Tp.coeff(1), Tm.coeff(2))
