"""Analytic functions of one even variable with Grassmann coefficients.

The symbolic family is finite sums  sum_c e^{c z} P_c(z)  where each rate c
is a complex number and each P_c is a Laurent polynomial with Grassmann
coefficients.  It is closed under sums, products and d/dz, contains the
Laurent polynomials (rate 0) and every exp-affine function scale*e^{rate z}
(a nilpotent part of the rate becomes a polynomial prefactor).  Functions
outside the family are carried as `SampledFunction`, evaluated through
truncated Taylor jets.

A function is extended to Grassmann arguments z = z_B + z_S by the finite
Taylor sum  f(z) = sum_l z_S^l / l! f^(l)(z_B).
"""
from __future__ import annotations

import cmath
import math
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import (BodyVanishes, DomainViolation, NoSquareRoot, SchemaError,
                     UnsupportedComposition, UnsupportedOperation)
from .grassmann import GrassmannNumber, dense_product, gr_exp, gr_invert

RATE_MERGE = 1e-11
WINDING_SAMPLES = 4096
WINDING_FLOOR = 1e-9

# rates equal up to rounding share one representative float, so that e^{cz}
# terms produced along different arithmetic paths land in one bucket
_RATE_CELLS: dict[tuple[int, int], list[complex]] = {}


def _rate_key(c: complex) -> complex:
    c = complex(c) + 0j
    if c == 0:
        return 0j
    tol = RATE_MERGE * max(1.0, abs(c))
    cell = (round(c.real * 1e9), round(c.imag * 1e9))
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for r in _RATE_CELLS.get((cell[0] + dx, cell[1] + dy), ()):
                if abs(r - c) <= tol:
                    return r
    _RATE_CELLS.setdefault(cell, []).append(c)
    return c


def default_sample_points(n: int = 32, radii=(0.8, 1.3)) -> list[complex]:
    """Deterministic points on a few circles around the origin."""
    pts = []
    per = max(1, n // len(radii))
    for k, r in enumerate(radii):
        for j in range(per):
            pts.append(r * cmath.exp(2j * math.pi * (j + 0.37 * (k + 1)) / per))
    return pts[:n]


def _binomial_row(p: int) -> list[int]:
    return [math.comb(p, k) for k in range(p + 1)]


DENSE_MIN_WORK = 1500


def _worth_dense(p1: dict, p2: dict, L: int) -> bool:
    if L > 8:
        return False
    t1 = sum(len(a.terms) for a in p1.values())
    t2 = sum(len(a.terms) for a in p2.values())
    return t1 * t2 >= DENSE_MIN_WORK


def _to_dense(poly: dict, L: int) -> tuple[int, np.ndarray]:
    lo = min(poly)
    arr = np.zeros((max(poly) - lo + 1, 1 << L), dtype=complex)
    for e, a in poly.items():
        row = arr[e - lo]
        for m, c in a.terms.items():
            row[m] = c
    return lo, arr


def _dense_accumulate(bucket: dict, p1: dict, p2: dict, L: int):
    lo1, A = _to_dense(p1, L)
    lo2, B = _to_dense(p2, L)
    R = dense_product(A, B, L)
    for k in range(R.shape[0]):
        nz = np.flatnonzero(R[k])
        if not len(nz):
            continue
        prod = GrassmannNumber._raw(L, dict(zip(nz.tolist(), R[k, nz].tolist())))
        e = lo1 + lo2 + k
        bucket[e] = bucket[e] + prod if e in bucket else prod


class ComponentFunction:
    """Element of the exp-Laurent family; immutable."""

    __slots__ = ("L", "terms")

    def __init__(self, L: int, terms: Mapping[complex, Mapping[int, GrassmannNumber]] | None = None):
        self.L = L
        clean: dict[complex, dict[int, GrassmannNumber]] = {}
        if terms:
            for c, poly in terms.items():
                key = _rate_key(c)
                bucket = clean.setdefault(key, {})
                for p, a in poly.items():
                    a = GrassmannNumber.coerce(a, L)
                    if not a.terms:
                        continue
                    if p in bucket:
                        a = bucket[p] + a
                        if not a.terms:
                            del bucket[p]
                            continue
                    bucket[int(p)] = a
                if not bucket:
                    del clean[key]
        self.terms = clean

    # constructors
    @classmethod
    def laurent(cls, coeffs: Mapping[int, object], L: int) -> "ComponentFunction":
        return cls(L, {0j: {p: GrassmannNumber.coerce(a, L) for p, a in coeffs.items()}})

    @classmethod
    def constant(cls, c, L: int) -> "ComponentFunction":
        return cls.laurent({0: c}, L)

    @classmethod
    def zero(cls, L: int) -> "ComponentFunction":
        return cls(L)

    @classmethod
    def monomial(cls, c, p: int, L: int) -> "ComponentFunction":
        return cls.laurent({p: c}, L)

    @classmethod
    def identity(cls, L: int) -> "ComponentFunction":
        return cls.monomial(1.0, 1, L)

    @classmethod
    def exp_affine(cls, scale, rate, L: int, prefactor: "ComponentFunction | None" = None) -> "ComponentFunction":
        """scale * e^{rate z} * prefactor, with scale and rate even Grassmann."""
        scale = GrassmannNumber.coerce(scale, L)
        rate = GrassmannNumber.coerce(rate, L)
        if not (scale.is_even() and rate.is_even()):
            raise UnsupportedOperation("exp-affine scale and rate must be even", "exp_affine")
        soul = rate.soul()
        poly: dict[int, GrassmannNumber] = {}
        power = GrassmannNumber.scalar(1.0, L)
        k = 0
        while power.terms:
            poly[k] = power.scale(1.0 / math.factorial(k))
            k += 1
            power = power * soul
        out = cls(L, {rate.body(): poly}) * scale
        if prefactor is not None:
            out = out * prefactor
        return out

    # structure
    def rates(self) -> list[complex]:
        return list(self.terms)

    def is_laurent(self) -> bool:
        return all(c == 0 for c in self.terms)

    def laurent_coeffs(self) -> dict[int, GrassmannNumber]:
        if not self.is_laurent():
            raise UnsupportedOperation("function has exponential factors", "laurent_coeffs")
        return dict(self.terms.get(0j, {}))

    def coeff(self, p: int, rate: complex = 0j) -> GrassmannNumber:
        return self.terms.get(_rate_key(rate), {}).get(p, GrassmannNumber.zero(self.L))

    def powers(self) -> list[int]:
        return sorted({p for poly in self.terms.values() for p in poly})

    def domain(self) -> str:
        return "punctured" if any(p < 0 for p in self.powers()) else "entire"

    def parity(self) -> str:
        kinds = set()
        for poly in self.terms.values():
            for a in poly.values():
                kinds.add(a.parity())
        kinds.discard("zero")
        if not kinds:
            return "zero"
        if len(kinds) == 1:
            return kinds.pop()
        return "mixed"

    def _map_coeffs(self, fn) -> "ComponentFunction":
        return ComponentFunction(self.L, {c: {p: fn(a) for p, a in poly.items()} for c, poly in self.terms.items()})

    def body(self) -> "ComponentFunction":
        return self._map_coeffs(lambda a: GrassmannNumber.scalar(a.body(), self.L))

    def soul(self) -> "ComponentFunction":
        return self._map_coeffs(lambda a: a.soul())

    def even_part(self) -> "ComponentFunction":
        return self._map_coeffs(lambda a: a.even_part())

    def odd_part(self) -> "ComponentFunction":
        return self._map_coeffs(lambda a: a.odd_part())

    def involution(self) -> "ComponentFunction":
        return self._map_coeffs(lambda a: a.involution())

    def support(self) -> int:
        out = 0
        for poly in self.terms.values():
            for a in poly.values():
                out |= a.support()
        return out

    def extend(self, L: int) -> "ComponentFunction":
        return ComponentFunction(L, {c: {p: a.extend(L) for p, a in poly.items()} for c, poly in self.terms.items()})

    def chop(self, tol: float) -> "ComponentFunction":
        return self._map_coeffs(lambda a: a.chop(tol))

    def level(self, mask: int) -> dict[int, complex]:
        """Complex Laurent coefficients of the z_mask direction (rate 0 only)."""
        out = {}
        for p, a in self.laurent_coeffs().items():
            c = a.terms.get(mask, 0j)
            if c != 0:
                out[p] = c
        return out

    def masks(self) -> set[int]:
        return {m for poly in self.terms.values() for a in poly.values() for m in a.terms}

    # arithmetic
    def _lift(self, other) -> "ComponentFunction":
        if isinstance(other, ComponentFunction):
            return other
        return ComponentFunction.constant(other, self.L)

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            return other + self
        other = self._lift(other)
        out = {c: dict(poly) for c, poly in self.terms.items()}
        for c, poly in other.terms.items():
            bucket = out.setdefault(c, {})
            for p, a in poly.items():
                bucket[p] = bucket[p] + a if p in bucket else a
        return ComponentFunction(self.L, out)

    __radd__ = __add__

    def __neg__(self):
        return self._map_coeffs(lambda a: -a)

    def __sub__(self, other):
        if isinstance(other, SampledFunction):
            return (-other) + self
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            return SampledFunction.from_function(self) * other
        if isinstance(other, GrassmannNumber):
            return self._map_coeffs(lambda a: a * other)
        if not isinstance(other, ComponentFunction):
            c = complex(other)
            return self._map_coeffs(lambda a: a.scale(c))
        out: dict[complex, dict[int, GrassmannNumber]] = {}
        for c1, p1 in self.terms.items():
            for c2, p2 in other.terms.items():
                bucket = out.setdefault(_rate_key(c1 + c2), {})
                if _worth_dense(p1, p2, self.L):
                    _dense_accumulate(bucket, p1, p2, self.L)
                    continue
                for e1, a1 in p1.items():
                    for e2, a2 in p2.items():
                        prod = a1 * a2
                        if not prod.terms:
                            continue
                        e = e1 + e2
                        bucket[e] = bucket[e] + prod if e in bucket else prod
        return ComponentFunction(self.L, out)

    def __rmul__(self, other):
        if isinstance(other, GrassmannNumber):
            return self._map_coeffs(lambda a: other * a)
        return self * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ComponentFunction.constant(1.0, self.L)
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, ComponentFunction):
            return self * other.inverse()
        if isinstance(other, GrassmannNumber):
            return self * gr_invert(other)
        return self * (1.0 / complex(other))

    def derivative(self, k: int = 1) -> "ComponentFunction":
        f = self
        for _ in range(k):
            out: dict[complex, dict[int, GrassmannNumber]] = {}
            for c, poly in f.terms.items():
                bucket: dict[int, GrassmannNumber] = {}
                for p, a in poly.items():
                    if c != 0:
                        bucket[p] = bucket[p] + a.scale(c) if p in bucket else a.scale(c)
                    if p != 0:
                        t = a.scale(p)
                        bucket[p - 1] = bucket[p - 1] + t if p - 1 in bucket else t
                out[c] = bucket
            f = ComponentFunction(self.L, out)
        return f

    # evaluation
    def value(self, z0: complex) -> GrassmannNumber:
        z0 = complex(z0)
        if z0 == 0 and self.domain() == "punctured":
            raise DomainViolation("Laurent function evaluated at 0", "eval_at")
        out = GrassmannNumber.zero(self.L)
        for c, poly in self.terms.items():
            e = cmath.exp(c * z0) if c != 0 else 1.0
            acc = GrassmannNumber.zero(self.L)
            for p, a in poly.items():
                acc = acc + a.scale(z0 ** p)
            out = out + acc.scale(e)
        return out

    def body_values(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.zeros_like(zs)
        for c, poly in self.terms.items():
            acc = np.zeros_like(zs)
            for p, a in poly.items():
                b = a.body()
                if b != 0:
                    acc = acc + b * zs ** p
            out = out + (np.exp(c * zs) if c != 0 else 1.0) * acc
        return out

    def jet(self, z0: complex, order: int) -> "Jet":
        coeffs = []
        f = self
        for k in range(order + 1):
            coeffs.append(f.value(z0).scale(1.0 / math.factorial(k)))
            f = f.derivative()
        return Jet(complex(z0), coeffs, self.L)

    def eval_at(self, z: GrassmannNumber) -> GrassmannNumber:
        return eval_at(self, z)

    def sample_max(self, points: Iterable[complex]) -> float:
        return max((self.value(p).max_abs() for p in points), default=0.0)

    def max_coeff(self) -> float:
        return max((a.max_abs() for poly in self.terms.values() for a in poly.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_coeff() <= tol

    def close_to(self, other, tol: float = 1e-9) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other):
        if not isinstance(other, ComponentFunction):
            return NotImplemented
        return self.L == other.L and self.terms == other.terms

    def __hash__(self):
        return hash((self.L, tuple(sorted((str(c), p) for c, poly in self.terms.items() for p in poly))))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for c in sorted(self.terms, key=lambda r: (r.real, r.imag)):
            inner = " + ".join(f"[{a!r}]z^{p}" for p, a in sorted(self.terms[c].items()))
            parts.append(inner if c == 0 else f"e^({c:g}z)({inner})")
        return " + ".join(parts)

    # composition
    def compose_body(self, phi: tuple) -> "ComponentFunction":
        """f(phi(z)) for phi = ('affine', a, b): z -> a z + b, or ('inv', a): z -> a/z."""
        kind = phi[0]
        out: dict[complex, dict[int, GrassmannNumber]] = {}
        if kind == "affine":
            a, b = complex(phi[1]), complex(phi[2])
            for c, poly in self.terms.items():
                pref = cmath.exp(c * b) if c != 0 else 1.0
                bucket: dict[int, GrassmannNumber] = {}
                for p, A in poly.items():
                    if b == 0:
                        t = A.scale(pref * a ** p)
                        bucket[p] = bucket[p] + t if p in bucket else t
                        continue
                    if p < 0:
                        raise UnsupportedComposition("negative power under a shift", "compose")
                    for k, binom in enumerate(_binomial_row(p)):
                        t = A.scale(pref * binom * a ** k * b ** (p - k))
                        bucket[k] = bucket[k] + t if k in bucket else t
                out[c * a] = bucket
        elif kind == "inv":
            a = complex(phi[1])
            bucket = {}
            for c, poly in self.terms.items():
                if c != 0:
                    raise UnsupportedComposition("exponential under z -> a/z", "compose")
                for p, A in poly.items():
                    bucket[-p] = A.scale(a ** p)
            out[0j] = bucket
        else:
            raise UnsupportedComposition(f"unknown inner map {kind!r}", "compose")
        return ComponentFunction(self.L, out)

    def body_map(self) -> tuple | None:
        """Recognise the body as z -> a z + b or z -> a/z."""
        b = self.body()
        if not b.is_laurent():
            return None
        co = {p: a.body() for p, a in b.laurent_coeffs().items()}
        if set(co) <= {0, 1} and co.get(1, 0) != 0:
            return ("affine", co[1], co.get(0, 0j))
        if set(co) == {-1}:
            return ("inv", co[-1])
        return None

    def compose(self, inner: "ComponentFunction", allow_sampled: bool = False):
        """f(inner(z)) via the Taylor formula around the body of the inner map."""
        if isinstance(inner, SampledFunction):
            return SampledFunction.from_function(self).compose(inner)
        phi = inner.body_map()
        if phi is None:
            if allow_sampled:
                return SampledFunction.from_function(self).compose(SampledFunction.from_function(inner))
            raise UnsupportedComposition("inner body map is not affine or a/z", "compose")
        try:
            s = inner - inner.body()
            out = self.compose_body(phi)
            deriv = self
            power = ComponentFunction.constant(1.0, self.L)
            k = 0
            while True:
                k += 1
                power = power * s
                if not power.terms:
                    return out
                deriv = deriv.derivative()
                out = out + power * deriv.compose_body(phi) * (1.0 / math.factorial(k))
        except UnsupportedComposition:
            if allow_sampled:
                return SampledFunction.from_function(self).compose(SampledFunction.from_function(inner))
            raise

    # units, roots, logarithms
    def _single_rate(self, op: str):
        if len(self.terms) != 1:
            raise UnsupportedOperation("needs a single exponential rate", op)
        (c, poly), = self.terms.items()
        return c, ComponentFunction(self.L, {0j: poly})

    def _monomial_split(self, op: str):
        """Write a rate-0 function as c0 z^m (1 + u) with u nilpotent."""
        body = {p: a.body() for p, a in self.laurent_coeffs().items() if a.body() != 0}
        if len(body) != 1:
            raise UnsupportedOperation("body is not a single monomial", op)
        (m, c0), = body.items()
        lead = ComponentFunction.monomial(c0, m, self.L)
        u = self * ComponentFunction.monomial(1.0 / c0, -m, self.L) - 1.0
        return c0, m, lead, u

    def inverse(self) -> "ComponentFunction":
        c, poly = self._single_rate("inverse")
        c0, m, _, u = poly._monomial_split("inverse")
        series = _nilpotent_series(u, lambda k: (-1) ** k)
        return series * ComponentFunction(self.L, {-c: {-m: GrassmannNumber.scalar(1.0 / c0, self.L)}})

    def sqrt(self, branch: str = "principal") -> "ComponentFunction":
        try:
            c, poly = self._single_rate("sqrt")
            c0, m, _, u = poly._monomial_split("sqrt")
        except UnsupportedOperation as exc:
            raise NoSquareRoot(str(exc), "sqrt") from None
        if m % 2:
            raise NoSquareRoot(f"body has odd order {m}", "sqrt")
        r = cmath.sqrt(c0) * (-1 if branch in ("negative", "-") else 1)
        coef = [1.0]
        for k in range(1, self.L + 1):
            coef.append(coef[-1] * (0.5 - (k - 1)) / k)
        series = _nilpotent_series(u, lambda k: coef[k])
        return series * ComponentFunction(self.L, {c / 2: {m // 2: GrassmannNumber.scalar(r, self.L)}})

    def log_unit(self) -> "ComponentFunction":
        """log of a rate-0 function whose body is a nonzero constant."""
        body = {p: a.body() for p, a in self.laurent_coeffs().items() if a.body() != 0}
        if set(body) != {0}:
            raise UnsupportedOperation("log needs a constant nonzero body", "log")
        c0 = body[0]
        u = self * (1.0 / c0) - 1.0
        out = _nilpotent_series(u, lambda k: 0.0 if k == 0 else (-1) ** (k + 1) / k)
        return out + cmath.log(c0)

    def exp(self, allow_sampled: bool = False):
        """e^{f}; the body must be affine in z unless a sampled result is allowed."""
        b = self.body()
        s = self - b
        ok = b.is_laurent() and set(b.powers()) <= {0, 1}
        if not ok:
            if allow_sampled:
                return SampledFunction.from_function(self).exp()
            raise UnsupportedOperation("exp needs an affine body", "exp")
        bc = b.laurent_coeffs()
        c0 = bc.get(0, GrassmannNumber.zero(self.L)).body()
        c1 = bc.get(1, GrassmannNumber.zero(self.L)).body()
        series = _nilpotent_series(s, lambda k: 1.0 / math.factorial(k))
        return series * ComponentFunction(self.L, {c1: {0: GrassmannNumber.scalar(cmath.exp(c0), self.L)}})

    def split_powers(self) -> tuple["ComponentFunction", "ComponentFunction"]:
        """(nonnegative-power part, negative-power part) of a Laurent function."""
        co = self.laurent_coeffs()
        return (ComponentFunction.laurent({p: a for p, a in co.items() if p >= 0}, self.L),
                ComponentFunction.laurent({p: a for p, a in co.items() if p < 0}, self.L))

    # serialisation
    def to_json(self) -> dict:
        def poly_json(poly):
            return {"variant": "laurent", "L": self.L,
                    "coeffs": {str(p): poly[p].to_json() for p in sorted(poly)}}
        if self.is_laurent():
            return poly_json(self.terms.get(0j, {}))
        if len(self.terms) == 1:
            (c, poly), = self.terms.items()
            return {"variant": "exp_affine", "L": self.L,
                    "scale": GrassmannNumber.scalar(1.0, self.L).to_json(),
                    "rate": GrassmannNumber.scalar(c, self.L).to_json(),
                    "prefactor": poly_json(poly)}
        return {"variant": "exp_sum", "L": self.L,
                "terms": [{"rate": {"re": c.real, "im": c.imag}, "prefactor": poly_json(self.terms[c])}
                          for c in sorted(self.terms, key=lambda r: (r.real, r.imag))]}

    @classmethod
    def from_json(cls, data, path: str = "function", L: int | None = None) -> "ComponentFunction":
        if not isinstance(data, dict):
            raise SchemaError("expected a function object", path)
        variant = data.get("variant")
        L = data.get("L", L)
        if variant == "laurent":
            coeffs = data.get("coeffs")
            if not isinstance(coeffs, dict):
                raise SchemaError("'coeffs' must be an object keyed by power", path + ".coeffs")
            parsed = {}
            for key, val in coeffs.items():
                try:
                    p = int(key)
                except ValueError:
                    raise SchemaError(f"power {key!r} is not an integer", f"{path}.coeffs") from None
                g = GrassmannNumber.from_json(val, f"{path}.coeffs.{key}", L)
                if L is None:
                    L = g.L
                elif g.L != L:
                    raise SchemaError(f"generator count {g.L} differs from {L}", f"{path}.coeffs.{key}")
                parsed[p] = g
            if L is None:
                raise SchemaError("empty Laurent polynomial needs 'L'", path)
            return cls.laurent(parsed, L)
        if variant == "exp_affine":
            scale = GrassmannNumber.from_json(data.get("scale", 1.0), path + ".scale", L)
            L = scale.L
            rate = GrassmannNumber.from_json(data.get("rate"), path + ".rate", L)
            pref = data.get("prefactor")
            prefactor = cls.from_json(pref, path + ".prefactor", L) if pref is not None else None
            return cls.exp_affine(scale, rate, L, prefactor)
        if variant == "exp_sum":
            if L is None:
                raise SchemaError("'exp_sum' needs 'L'", path)
            out = cls.zero(L)
            for k, t in enumerate(data.get("terms", [])):
                r = t.get("rate", {})
                c = complex(float(r.get("re", 0.0)), float(r.get("im", 0.0)))
                poly = cls.from_json(t.get("prefactor"), f"{path}.terms[{k}].prefactor", L)
                out = out + poly * cls(L, {c: {0: GrassmannNumber.scalar(1.0, L)}})
            return out
        raise SchemaError(f"unknown function variant {variant!r}", path + ".variant")


EvenFunction = ComponentFunction
OddFunction = ComponentFunction


def _nilpotent_series(u: ComponentFunction, coeff: Callable[[int], float]) -> ComponentFunction:
    """sum_k coeff(k) u^k for nilpotent u."""
    out = ComponentFunction.constant(coeff(0), u.L) if coeff(0) != 0 else ComponentFunction.zero(u.L)
    power = ComponentFunction.constant(1.0, u.L)
    k = 0
    while True:
        k += 1
        power = power * u
        if not power.terms:
            return out
        c = coeff(k)
        if c != 0:
            out = out + power * c


def require_parity(f, parity: str, name: str = "function"):
    """Reject functions whose coefficients are not of the requested parity."""
    from .errors import ParityError
    p = f.parity() if hasattr(f, "parity") else "mixed"
    if p not in (parity, "zero"):
        raise ParityError(f"{name} must be {parity}, found {p}")
    return f


# truncated Taylor jets

class Jet:
    """Taylor coefficients c_k = f^(k)(z0)/k! for k <= order, Grassmann valued."""

    __slots__ = ("z0", "coeffs", "L")

    def __init__(self, z0: complex, coeffs: list[GrassmannNumber], L: int):
        self.z0 = z0
        self.coeffs = list(coeffs)
        self.L = L

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def truncate(self, order: int) -> "Jet":
        return Jet(self.z0, self.coeffs[:order + 1], self.L)

    def __add__(self, other: "Jet") -> "Jet":
        n = min(self.order, other.order)
        return Jet(self.z0, [self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], self.L)

    def __neg__(self):
        return Jet(self.z0, [-c for c in self.coeffs], self.L)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(self.z0, [c * other for c in self.coeffs], self.L)
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            acc = GrassmannNumber.zero(self.L)
            for j in range(k + 1):
                acc = acc + self.coeffs[j] * other.coeffs[k - j]
            out.append(acc)
        return Jet(self.z0, out, self.L)

    def derivative(self) -> "Jet":
        return Jet(self.z0, [self.coeffs[k].scale(k) for k in range(1, len(self.coeffs))], self.L)

    def derivatives(self) -> list[GrassmannNumber]:
        return [c.scale(math.factorial(k)) for k, c in enumerate(self.coeffs)]

    def exp(self) -> "Jet":
        c0 = self.coeffs[0]
        h = Jet(self.z0, [GrassmannNumber.zero(self.L)] + self.coeffs[1:], self.L)
        out = _jet_series(h, lambda k: 1.0 / math.factorial(k), self.order)
        return out * gr_exp(c0)

    @staticmethod
    def compose(outer: "Jet", inner: "Jet") -> "Jet":
        """Jet of outer(inner(t)); outer is expanded at the body of inner's value."""
        w0 = inner.coeffs[0].body()
        if abs(w0 - outer.z0) > 1e-12:
            raise ValueError("outer jet is not based at the inner value")
        h = Jet(inner.z0, [inner.coeffs[0] - w0] + inner.coeffs[1:], inner.L)
        order = inner.order
        out = Jet(inner.z0, [GrassmannNumber.zero(inner.L)] * (order + 1), inner.L)
        power = Jet(inner.z0, [GrassmannNumber.scalar(1.0, inner.L)] + [GrassmannNumber.zero(inner.L)] * order, inner.L)
        for k, ck in enumerate(outer.coeffs):
            if k:
                power = power * h
            if all(not c.terms for c in power.coeffs):
                break
            out = out + power * ck
        return out


def _jet_series(h: Jet, coeff, order: int) -> Jet:
    L = h.L
    one = [GrassmannNumber.scalar(1.0, L)] + [GrassmannNumber.zero(L)] * order
    out = Jet(h.z0, [c.scale(coeff(0)) for c in one], L)
    power = Jet(h.z0, one, L)
    for k in range(1, order + L + 2):
        power = power * h
        if all(not c.terms for c in power.coeffs):
            break
        out = out + power * coeff(k)
    return out


class SampledFunction:
    """Function known only through jets at body points."""

    def __init__(self, jet_fn: Callable[[complex, int], Jet], L: int, domain: str = "annulus",
                 singular: tuple = ()):
        self.jet_fn = jet_fn
        self.L = L
        self._domain = domain
        self.singular = tuple(complex(s) for s in singular)

    @classmethod
    def from_function(cls, f) -> "SampledFunction":
        if isinstance(f, SampledFunction):
            return f
        sing = (0j,) if f.domain() == "punctured" else ()
        return cls(f.jet, f.L, f.domain(), sing)

    def domain(self) -> str:
        return self._domain

    def parity(self) -> str:
        kinds = {c.parity() for c in self.jet(0.7 + 0.3j, 0).coeffs}
        kinds.discard("zero")
        return "zero" if not kinds else (kinds.pop() if len(kinds) == 1 else "mixed")

    def jet(self, z0: complex, order: int) -> Jet:
        z0 = complex(z0)
        if any(abs(z0 - s) < 1e-14 for s in self.singular):
            raise DomainViolation(f"{z0} is a singular point", "eval_at")
        return self.jet_fn(z0, order)

    def value(self, z0: complex) -> GrassmannNumber:
        return self.jet(z0, 0).coeffs[0]

    def eval_at(self, z: GrassmannNumber) -> GrassmannNumber:
        return eval_at(self, z)

    def derivative(self, k: int = 1) -> "SampledFunction":
        base = self

        def jet_fn(z0, order):
            j = base.jet(z0, order + k)
            for _ in range(k):
                j = j.derivative()
            return j
        return SampledFunction(jet_fn, self.L, self._domain, self.singular)

    def _combine(self, other, op):
        other = SampledFunction.from_function(other) if isinstance(other, ComponentFunction) else other
        if not isinstance(other, SampledFunction):
            c = other
            return SampledFunction(lambda z0, n: op(self.jet(z0, n), c), self.L, self._domain, self.singular)
        return SampledFunction(lambda z0, n: op(self.jet(z0, n), other.jet(z0, n)), self.L,
                               self._domain, self.singular + other.singular)

    def __add__(self, other):
        if isinstance(other, (int, float, complex, GrassmannNumber)):
            other = ComponentFunction.constant(other, self.L)
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __neg__(self):
        return SampledFunction(lambda z0, n: -self.jet(z0, n), self.L, self._domain, self.singular)

    def __sub__(self, other):
        if isinstance(other, (int, float, complex, GrassmannNumber)):
            other = ComponentFunction.constant(other, self.L)
        return self + (-SampledFunction.from_function(other))

    def __mul__(self, other):
        if isinstance(other, (ComponentFunction, SampledFunction)):
            return self._combine(other, lambda a, b: a * b)
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def exp(self) -> "SampledFunction":
        return SampledFunction(lambda z0, n: self.jet(z0, n).exp(), self.L, self._domain, self.singular)

    def compose(self, inner) -> "SampledFunction":
        inner = SampledFunction.from_function(inner)
        outer = self
        extra = self.L // 2 + 1

        def jet_fn(z0, order):
            ij = inner.jet(z0, order)
            oj = outer.jet(ij.coeffs[0].body(), order + extra)
            return Jet.compose(oj, ij)
        return SampledFunction(jet_fn, self.L, "annulus", inner.singular)

    def sample_max(self, points: Iterable[complex]) -> float:
        return max((self.value(p).max_abs() for p in points), default=0.0)

    def close_to(self, other, tol: float = 1e-9, points: Iterable[complex] | None = None) -> bool:
        """Compare on 64 points spread over radii 0.5, 1 and 2."""
        if points is None:
            points = [r * cmath.exp(2j * math.pi * (k + 0.5) / 64) for r in (0.5, 1.0, 2.0) for k in range(64)]
        diff = self - other
        return diff.sample_max(points) <= tol


def eval_at(f, z: GrassmannNumber) -> GrassmannNumber:
    """Superanalytic extension: sum_l z_S^l / l! f^(l)(z_B)."""
    if not z.is_even():
        raise DomainViolation("argument must be an even Grassmann number", "eval_at")
    zb = z.body()
    s = z.soul()
    if isinstance(f, ComponentFunction) and zb == 0 and f.domain() == "punctured":
        raise DomainViolation("body of the argument is 0 on a punctured domain", "eval_at")
    order = z.L // 2
    j = f.jet(zb, order)
    out = j.coeffs[0]
    power = GrassmannNumber.scalar(1.0, z.L)
    for k in range(1, order + 1):
        power = power * s
        if not power.terms:
            break
        out = out + power * j.coeffs[k]
    return out


def winding_degree(f, samples: int = WINDING_SAMPLES, floor: float = WINDING_FLOOR) -> int:
    """Argument-principle degree of the body on the unit circle."""
    t = np.exp(2j * np.pi * np.arange(samples) / samples)
    if isinstance(f, ComponentFunction):
        vals = f.body_values(t)
    else:
        vals = np.array([f.value(z).body() for z in t])
    if np.min(np.abs(vals)) < floor:
        raise BodyVanishes("body vanishes on the unit circle", "winding_degree")
    ang = np.unwrap(np.angle(np.append(vals, vals[0])))
    return int(round((ang[-1] - ang[0]) / (2 * np.pi)))
