"""Finite Grassmann algebra over the complex numbers.

An element of the algebra on L anticommuting generators z_1..z_L is stored
sparsely as a map from generator subsets (bitmasks, bit j-1 <-> z_j) to
complex coefficients.  Elements are immutable.
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import MismatchedAlgebra, ParityError, SchemaError, ZeroBody

MAX_GENERATORS = 12
BODY_TOL = 1e-12


@lru_cache(maxsize=1 << 16)
def reorder_sign(a: int, b: int) -> int:
    """Sign of z_A z_B -> z_{A|B}; zero when A and B share a generator."""
    if a & b:
        return 0
    swaps = 0
    rest = b
    while rest:
        low = rest & -rest
        # generators of A sitting above this generator of B must hop over it
        swaps += (a & ~((low << 1) - 1)).bit_count()
        rest ^= low
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def product_table(L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All disjoint pairs (a, b) with sign and union a|b, as index arrays."""
    a_idx, b_idx, out_idx, sign = [], [], [], []
    full = (1 << L) - 1
    for a in range(1 << L):
        rest = full & ~a
        b = rest
        while True:
            a_idx.append(a)
            b_idx.append(b)
            out_idx.append(a | b)
            sign.append(reorder_sign(a, b))
            if b == 0:
                break
            b = (b - 1) & rest
    return (np.array(a_idx), np.array(b_idx), np.array(out_idx), np.array(sign, dtype=float))


def dense_product(A: np.ndarray, B: np.ndarray, L: int) -> np.ndarray:
    """Convolution of polynomials with Grassmann coefficients.

    A has shape (P, 2^L), B shape (Q, 2^L); row k holds the coefficient of
    the k-th power.  Returns the (P + Q - 1, 2^L) product.
    """
    a_idx, b_idx, out_idx, sign = product_table(L)
    n = 1 << L
    M = np.zeros((A.shape[0], n, n), dtype=complex)
    M[:, out_idx, b_idx] = A[:, a_idx] * sign
    Y = (M.reshape(-1, n) @ B.T).reshape(A.shape[0], n, B.shape[0]).transpose(0, 2, 1)
    R = np.zeros((A.shape[0] + B.shape[0] - 1, n), dtype=complex)
    for k in range(A.shape[0]):
        R[k:k + B.shape[0]] += Y[k]
    return R


def mask_to_indices(mask: int) -> tuple[int, ...]:
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def indices_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for j in indices:
        mask |= 1 << (j - 1)
    return mask


class MultiIndex:
    """Strictly increasing generator list with the soul-level ordering.

    Longer multi-indices are greater; equal lengths compare
    lexicographically, so (1,2,4) > (1,2,3).
    """

    __slots__ = ("indices",)

    def __init__(self, indices: Iterable[int]):
        idx = tuple(indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"multi-index must be strictly increasing: {idx}")
        self.indices = idx

    @classmethod
    def from_mask(cls, mask: int) -> "MultiIndex":
        return cls(mask_to_indices(mask))

    @property
    def mask(self) -> int:
        return indices_to_mask(self.indices)

    def key(self):
        return (len(self.indices), self.indices)

    def __lt__(self, other):
        return self.key() < other.key()

    def __eq__(self, other):
        return isinstance(other, MultiIndex) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __len__(self):
        return len(self.indices)

    def __repr__(self):
        return f"MultiIndex{self.indices}"


def level_key(mask: int):
    return (mask.bit_count(), mask_to_indices(mask))


def ordered_masks(L: int, parity: int | None = None, include_empty: bool = True) -> list[int]:
    """All subsets of {1..L} in multi-index order, optionally of one parity."""
    masks = [m for m in range(1 << L)
             if (parity is None or m.bit_count() % 2 == parity)
             and (include_empty or m)]
    return sorted(masks, key=level_key)


class GrassmannNumber:
    __slots__ = ("L", "terms")

    def __init__(self, L: int, terms: Mapping[int, complex] | None = None):
        if not isinstance(L, int) or L < 0 or L > MAX_GENERATORS:
            raise ValueError(f"generator count must be in 0..{MAX_GENERATORS}, got {L}")
        clean = {}
        if terms:
            limit = 1 << L
            for mask, c in terms.items():
                if mask < 0 or mask >= limit:
                    raise ValueError(f"subset mask {mask} out of range for L={L}")
                c = complex(c)
                if c != 0:
                    clean[mask] = c
        self.L = L
        self.terms = clean

    # construction helpers
    @classmethod
    def scalar(cls, c: complex, L: int) -> "GrassmannNumber":
        return cls(L, {0: c})

    @classmethod
    def _raw(cls, L: int, terms: dict) -> "GrassmannNumber":
        # trusted constructor: terms already validated and nonzero
        obj = object.__new__(cls)
        obj.L = L
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, L: int) -> "GrassmannNumber":
        return cls(L)

    @classmethod
    def generator(cls, j: int, L: int, coeff: complex = 1.0) -> "GrassmannNumber":
        if not 1 <= j <= L:
            raise ValueError(f"generator index {j} outside 1..{L}")
        return cls(L, {1 << (j - 1): coeff})

    @classmethod
    def monomial(cls, indices: Iterable[int], L: int, coeff: complex = 1.0) -> "GrassmannNumber":
        """Product z_{i1} z_{i2} ... in the given order, times coeff."""
        out = cls.scalar(coeff, L)
        for j in indices:
            out = out * cls.generator(j, L)
        return out

    @classmethod
    def coerce(cls, x, L: int) -> "GrassmannNumber":
        if isinstance(x, GrassmannNumber):
            if x.L != L:
                raise MismatchedAlgebra(f"generator counts differ: {x.L} vs {L}")
            return x
        return cls.scalar(complex(x), L)

    # structure
    def body(self) -> complex:
        return self.terms.get(0, 0j)

    def soul(self) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: c for m, c in self.terms.items() if m})

    def parity(self) -> str:
        """'even', 'odd', 'mixed', or 'zero' for the zero element."""
        kinds = {m.bit_count() & 1 for m in self.terms}
        if not kinds:
            return "zero"
        if len(kinds) == 2:
            return "mixed"
        return "odd" if kinds.pop() else "even"

    def is_even(self) -> bool:
        return self.parity() in ("even", "zero")

    def is_odd(self) -> bool:
        return self.parity() in ("odd", "zero")

    def even_part(self) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: c for m, c in self.terms.items() if not m.bit_count() & 1})

    def odd_part(self) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: c for m, c in self.terms.items() if m.bit_count() & 1})

    def involution(self) -> "GrassmannNumber":
        """Grade involution: even part minus odd part."""
        return GrassmannNumber(self.L, {m: (-c if m.bit_count() & 1 else c) for m, c in self.terms.items()})

    def support(self) -> int:
        """Bitmask of every generator that appears in some term."""
        out = 0
        for m in self.terms:
            out |= m
        return out

    def coefficient(self, indices: Iterable[int]) -> complex:
        return self.terms.get(indices_to_mask(indices), 0j)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def chop(self, tol: float) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: c for m, c in self.terms.items() if abs(c) > tol})

    def extend(self, L: int) -> "GrassmannNumber":
        if L < self.L and self.support() >> L:
            raise MismatchedAlgebra(f"cannot restrict to {L} generators")
        return GrassmannNumber(L, self.terms)

    def conjugate_scalars(self) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: c.conjugate() for m, c in self.terms.items()})

    # arithmetic
    def _check(self, other: "GrassmannNumber"):
        if self.L != other.L:
            raise MismatchedAlgebra(f"generator counts differ: {self.L} vs {other.L}", "gr_mul")

    def __add__(self, other):
        other = GrassmannNumber.coerce(other, self.L) if not isinstance(other, GrassmannNumber) else other
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) + c
        return GrassmannNumber(self.L, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannNumber(self.L, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-GrassmannNumber.coerce(other, self.L) if not isinstance(other, GrassmannNumber) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: complex) -> "GrassmannNumber":
        return GrassmannNumber(self.L, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, GrassmannNumber):
            return self.scale(complex(other))
        self._check(other)
        out: dict[int, complex] = {}
        get = out.get
        sign = reorder_sign
        right = other.terms.items()
        for ma, ca in self.terms.items():
            for mb, cb in right:
                if ma & mb:
                    continue
                m = ma | mb
                out[m] = get(m, 0j) + sign(ma, mb) * ca * cb
        return GrassmannNumber._raw(self.L, {m: c for m, c in out.items() if c != 0})

    def __rmul__(self, other):
        # scalars commute with everything
        return self.scale(complex(other))

    def __truediv__(self, other):
        if isinstance(other, GrassmannNumber):
            return self * gr_invert(other)
        return self.scale(1.0 / complex(other))

    def __pow__(self, n: int):
        return gr_int_pow(self, n)

    def close_to(self, other, tol: float = 1e-12) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = GrassmannNumber.scalar(other, self.L)
        if not isinstance(other, GrassmannNumber):
            return NotImplemented
        return self.L == other.L and self.terms == other.terms

    def __hash__(self):
        return hash((self.L, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=level_key):
            c = self.terms[m]
            name = "".join(f"z{j}" for j in mask_to_indices(m))
            parts.append(f"({c:g}){name}" if name else f"({c:g})")
        return " + ".join(parts)

    # serialisation
    def to_json(self) -> dict:
        return {
            "L": self.L,
            "terms": [
                {"idx": list(mask_to_indices(m)), "re": self.terms[m].real, "im": self.terms[m].imag}
                for m in sorted(self.terms, key=level_key)
            ],
        }

    @classmethod
    def from_json(cls, data, path: str = "grassmann", L: int | None = None) -> "GrassmannNumber":
        if isinstance(data, (int, float)):
            if L is None:
                raise SchemaError("bare number needs a known generator count", path)
            return cls.scalar(data, L)
        if not isinstance(data, dict):
            raise SchemaError("expected an object with 'L' and 'terms'", path)
        gl = data.get("L", L)
        if not isinstance(gl, int) or isinstance(gl, bool) or not 0 <= gl <= MAX_GENERATORS:
            raise SchemaError(f"'L' must be an integer in 0..{MAX_GENERATORS}", path + ".L")
        if L is not None and gl != L:
            raise SchemaError(f"generator count {gl} differs from expected {L}", path + ".L")
        terms = data.get("terms", [])
        if not isinstance(terms, list):
            raise SchemaError("'terms' must be a list", path + ".terms")
        out: dict[int, complex] = {}
        for k, t in enumerate(terms):
            tp = f"{path}.terms[{k}]"
            if not isinstance(t, dict) or "idx" not in t:
                raise SchemaError("term needs 'idx', 're', 'im'", tp)
            idx = t["idx"]
            if not isinstance(idx, list) or not all(isinstance(j, int) and not isinstance(j, bool) for j in idx):
                raise SchemaError("'idx' must be a list of integers", tp + ".idx")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise SchemaError("indices must be strictly increasing", tp + ".idx")
            if idx and (idx[0] < 1 or idx[-1] > gl):
                raise SchemaError(f"indices must lie in 1..{gl}", tp + ".idx")
            try:
                c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
            except (TypeError, ValueError):
                raise SchemaError("'re'/'im' must be numbers", tp) from None
            m = indices_to_mask(idx)
            if m in out:
                raise SchemaError(f"duplicate subset {idx}", tp + ".idx")
            out[m] = c
        return cls(gl, out)


def gr_mul(a: GrassmannNumber, b: GrassmannNumber) -> GrassmannNumber:
    return a * b


def _require_body(a: GrassmannNumber, op: str, tol: float) -> complex:
    b = a.body()
    if abs(b) < tol:
        raise ZeroBody(f"body {b} is below tolerance {tol}", op)
    return b


def _series(a: GrassmannNumber, coeffs) -> GrassmannNumber:
    """sum_k coeffs(k) * soul(a)^k; terminates once the power vanishes."""
    s = a.soul()
    out = GrassmannNumber.scalar(coeffs(0), a.L)
    power = GrassmannNumber.scalar(1.0, a.L)
    k = 0
    while True:
        k += 1
        power = power * s
        if not power.terms:
            return out
        out = out + power.scale(coeffs(k))


def gr_invert(a: GrassmannNumber, tol: float = BODY_TOL) -> GrassmannNumber:
    b = _require_body(a, "gr_invert", tol)
    return _series(a, lambda n: (-1) ** n / b ** (n + 1))


def gr_exp(a: GrassmannNumber) -> GrassmannNumber:
    eb = cmath.exp(a.body())
    return _series(a, lambda k: eb / math.factorial(k))


def gr_log(a: GrassmannNumber, tol: float = BODY_TOL) -> GrassmannNumber:
    b = _require_body(a, "gr_log", tol)
    return _series(a, lambda k: cmath.log(b) if k == 0 else (-1) ** (k + 1) / (k * b ** k))


def _binom_half(k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


def gr_sqrt(a: GrassmannNumber, branch: str = "principal", tol: float = BODY_TOL) -> GrassmannNumber:
    """Square root with the body root chosen by `branch` ('principal' or 'negative')."""
    b = _require_body(a, "gr_sqrt", tol)
    if branch not in ("principal", "negative", "+", "-"):
        raise ValueError(f"unknown branch {branch!r}")
    r = cmath.sqrt(b)
    if branch in ("negative", "-"):
        r = -r
    return _series(a, lambda k: r * _binom_half(k) / b ** k)


def gr_int_pow(a: GrassmannNumber, n: int) -> GrassmannNumber:
    if n < 0:
        return gr_int_pow(gr_invert(a), -n)
    out = GrassmannNumber.scalar(1.0, a.L)
    base = a
    while n:
        if n & 1:
            out = out * base
        n >>= 1
        if n:
            base = base * base
    return out


def odd_mult_matrix(g: GrassmannNumber, L: int | None = None) -> np.ndarray:
    """Matrix of theta -> g*theta on the odd subspace, odd basis in level order."""
    L = g.L if L is None else L
    g = g.extend(L) if g.L != L else g
    if g.parity() not in ("even", "zero"):
        raise ParityError("multiplier must be even", "odd_mult_matrix")
    _require_body(g, "odd_mult_matrix", BODY_TOL)
    basis = ordered_masks(L, parity=1)
    pos = {m: i for i, m in enumerate(basis)}
    M = np.zeros((len(basis), len(basis)), dtype=complex)
    for j, mj in enumerate(basis):
        for mg, c in g.terms.items():
            if mg & mj:
                continue
            M[pos[mg | mj], j] += reorder_sign(mg, mj) * c
    return M


def random_grassmann(rng: np.random.Generator, L: int, parity: str | None = None,
                     density: float = 0.5, body: bool = True, generators: int | None = None,
                     scale: float = 1.0) -> GrassmannNumber:
    """Random element; `generators` restricts support to z_1..z_generators."""
    top = L if generators is None else generators
    terms = {}
    for m in range(1 << top):
        pc = m.bit_count() & 1
        if parity == "even" and pc:
            continue
        if parity == "odd" and not pc:
            continue
        if m == 0 and not body:
            continue
        if m and rng.random() > density:
            continue
        terms[m] = scale * complex(rng.normal(), rng.normal())
    return GrassmannNumber(L, terms)
