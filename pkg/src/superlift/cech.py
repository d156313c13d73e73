"""Atlas consistency checks and the weighted Laurent coboundary solver.

The solver splits a Laurent polynomial l(z) on the punctured plane as

    l(z) = w(z) b_nor(z) - b_sou(1/z)

with b_nor, b_sou polynomials of degree <= D, by matching coefficients in a
finite linear system.  When the two power ranges leave a gap, the answer is
an `Obstruction` naming the powers that no choice of (b_nor, b_sou) reaches.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .analytic import ComponentFunction, default_sample_points
from .errors import DegreeBoundExceeded, SchemaError
from .supermap import N2Map, compose, invert, map_from_json

CF = ComponentFunction
SOLVE_TOL = 1e-10


@dataclass
class CoboundaryProblem:
    ell: dict            # power -> complex
    weight: dict         # power -> complex, body Laurent polynomial
    degree_bound: int | None = None

    def __post_init__(self):
        self.ell = {int(p): complex(c) for p, c in self.ell.items() if c != 0}
        self.weight = {int(p): complex(c) for p, c in self.weight.items() if c != 0}
        if not self.weight:
            raise ValueError("weight must be nonzero")

    def default_bound(self) -> int:
        powers = list(self.ell) + list(self.weight)
        return 2 * max((abs(p) for p in powers), default=0) + 4


@dataclass
class Splitting:
    b_nor: dict
    b_sou: dict
    residual: float

    def reproduce(self, weight: dict) -> dict:
        """w(z) b_nor(z) - b_sou(1/z) as a power -> coefficient map."""
        out: dict[int, complex] = {}
        for j, b in self.b_nor.items():
            for p, w in weight.items():
                out[p + j] = out.get(p + j, 0j) + w * b
        for j, b in self.b_sou.items():
            out[-j] = out.get(-j, 0j) - b
        return {p: c for p, c in out.items() if c != 0}


@dataclass
class Obstruction:
    uncovered: list
    residual_cocycle: dict
    degree_bound: int

    def to_json(self) -> dict:
        return {"uncovered_powers": self.uncovered,
                "residual_cocycle": {str(p): {"re": c.real, "im": c.imag}
                                     for p, c in sorted(self.residual_cocycle.items())},
                "degree_bound": self.degree_bound}


def _system(prob: CoboundaryProblem, D: int):
    rows = set(prob.ell)
    for j in range(D + 1):
        rows.update(p + j for p in prob.weight)
        rows.add(-j)
    rows = sorted(rows)
    index = {p: i for i, p in enumerate(rows)}
    A_nor = np.zeros((len(rows), D + 1), dtype=complex)
    A_sou = np.zeros((len(rows), D + 1), dtype=complex)
    for j in range(D + 1):
        for p, w in prob.weight.items():
            A_nor[index[p + j], j] += w
        A_sou[index[-j], j] = -1.0
    rhs = np.zeros(len(rows), dtype=complex)
    for p, c in prob.ell.items():
        rhs[index[p]] = c
    return rows, A_nor, A_sou, rhs


def _attempt(prob: CoboundaryProblem, D: int, tol: float):
    rows, A_nor, A_sou, rhs = _system(prob, D)
    # the northern chart absorbs everything it can reach; the rest goes south
    x = np.linalg.lstsq(A_nor, rhs, rcond=None)[0]
    r = rhs - A_nor @ x
    y = np.linalg.lstsq(A_sou, r, rcond=None)[0]
    res = r - A_sou @ y
    scale = max(1.0, float(np.max(np.abs(rhs))) if len(rhs) else 1.0)
    return rows, A_nor, A_sou, x, y, res, float(np.max(np.abs(res), initial=0.0)) <= tol * scale


def solve_coboundary(prob: CoboundaryProblem, tol: float = SOLVE_TOL):
    """Return a `Splitting` or an `Obstruction`."""
    D = prob.degree_bound if prob.degree_bound is not None else prob.default_bound()
    rows, A_nor, A_sou, x, y, res, ok = _attempt(prob, D, tol)
    if ok:
        b_nor = {j: complex(v) for j, v in enumerate(x) if abs(v) > 0}
        b_sou = {j: complex(v) for j, v in enumerate(y) if abs(v) > 0}
        sol = Splitting(b_nor, b_sou, 0.0)
        back = sol.reproduce(prob.weight)
        keys = set(back) | set(prob.ell)
        sol.residual = max((abs(back.get(p, 0j) - prob.ell.get(p, 0j)) for p in keys), default=0.0)
        return sol
    # which powers lie outside the column span of the full system
    A = np.hstack([A_nor, A_sou])
    lo = min(rows)
    hi = max(rows)
    uncovered = []
    index = {p: i for i, p in enumerate(rows)}
    for p in range(lo, hi + 1):
        if p not in index:
            uncovered.append(p)
            continue
        e = np.zeros(len(rows), dtype=complex)
        e[index[p]] = 1.0
        z = np.linalg.lstsq(A, e, rcond=None)[0]
        if np.max(np.abs(e - A @ z)) > 1e-8:
            uncovered.append(p)
    full = np.linalg.lstsq(A, np.array([prob.ell.get(p, 0j) for p in rows]), rcond=None)[0]
    left = np.array([prob.ell.get(p, 0j) for p in rows]) - A @ full
    residual = {p: complex(left[index[p]]) for p in rows if abs(left[index[p]]) > 1e-12}
    # a larger bound that succeeds means the caller's bound was the problem
    span = max((abs(p) for p in list(prob.ell) + list(prob.weight)), default=0)
    bigger = 2 * D + 2 * span + 4
    if _attempt(prob, bigger, tol)[-1]:
        raise DegreeBoundExceeded(f"a splitting exists only with degree above {D}", "solve_coboundary")
    return Obstruction(uncovered, residual, D)


def body_laurent(f: ComponentFunction) -> dict:
    """Complex Laurent coefficients of the body of a rate-0 function."""
    return {p: a.body() for p, a in f.laurent_coeffs().items() if a.body() != 0}


# atlases

@dataclass
class Atlas:
    """Charts plus transition maps; key (a, b) is the map from chart b to chart a."""

    cover: str
    transitions: dict
    charts: dict = field(default_factory=dict)
    tau: complex | None = None
    theta_type: object = None

    @classmethod
    def sphere(cls, transition) -> "Atlas":
        return cls("sphere2", {("sou", "nor"): transition},
                   {"nor": "disc around 0", "sou": "disc around infinity"})

    @classmethod
    def torus(cls, tau: complex, h1, htau, theta_type=None) -> "Atlas":
        return cls("torus", {"1": h1, "tau": htau}, {"strip": "fundamental domain"}, complex(tau), theta_type)

    def transition(self, a, b):
        if (a, b) in self.transitions:
            return self.transitions[(a, b)]
        if (b, a) in self.transitions:
            return invert(self.transitions[(b, a)])
        raise KeyError((a, b))

    def to_json(self) -> dict:
        if self.cover == "torus":
            return {"cover": "torus", "tau": {"re": self.tau.real, "im": self.tau.imag},
                    "transitions": {k: self.transitions[k].to_json() for k in ("1", "tau")}}
        return {"cover": self.cover,
                "transitions": {f"{a}|{b}": h.to_json() for (a, b), h in sorted(self.transitions.items())}}

    @classmethod
    def from_json(cls, data, L: int | None = None) -> "Atlas":
        if not isinstance(data, dict):
            raise SchemaError("expected an atlas object", "atlas")
        cover = data.get("cover")
        trans = data.get("transitions")
        if not isinstance(trans, dict):
            raise SchemaError("'transitions' must be an object", "atlas.transitions")
        if cover == "torus":
            tau = data.get("tau")
            if not isinstance(tau, dict):
                raise SchemaError("'tau' must be {re, im}", "atlas.tau")
            t = complex(float(tau.get("re", 0)), float(tau.get("im", 0)))
            if t.imag <= 0:
                raise SchemaError("Im tau must be positive", "atlas.tau")
            maps = {}
            for k in ("1", "tau"):
                if k not in trans:
                    raise SchemaError("missing generator transition", f"atlas.transitions.{k}")
                maps[k] = map_from_json(trans[k], f"atlas.transitions.{k}", L)
            return cls.torus(t, maps["1"], maps["tau"])
        if cover in ("sphere2", "generic"):
            out = {}
            for key, val in trans.items():
                parts = key.split("|")
                if len(parts) != 2:
                    raise SchemaError("transition keys look like 'target|source'", f"atlas.transitions.{key}")
                out[tuple(parts)] = map_from_json(val, f"atlas.transitions.{key}", L)
            if cover == "sphere2" and ("sou", "nor") not in out and ("nor", "sou") not in out:
                raise SchemaError("sphere atlas needs a 'sou|nor' transition", "atlas.transitions")
            return cls(cover, out)
        raise SchemaError(f"unknown cover {cover!r}", "atlas.cover")


@dataclass
class CocycleReport:
    passed: bool
    checks: dict
    note: str = ""
    tol: float = 1e-9

    def to_json(self) -> dict:
        return {"passed": self.passed, "note": self.note, "tol": self.tol,
                "checks": {k: self.checks[k] for k in sorted(self.checks)}}


def _component_residuals(A, B, points) -> dict:
    if isinstance(A, N2Map):
        a, b = A._h(), B._h()
        names = ["f", "psi_plus", "psi_minus", "g_plus", "g_minus"]
        pairs = zip([a.f, *a.psi, *a.g], [b.f, *b.psi, *b.g])
    else:
        names = ["f", "xi", "psi", "g"]
        pairs = zip([A.f, A.xi, A.psi, A.g], [B.f, B.xi, B.psi, B.g])
    return {n: _relative_gap(x, y, points) for n, (x, y) in zip(names, pairs)}


def _relative_gap(x, y, points) -> float:
    # scaled by max(1, |y|) so large fibre factors are judged at working precision
    worst = 0.0
    for p in points:
        ref = y.value(p)
        worst = max(worst, (x.value(p) - ref).max_abs() / max(1.0, ref.max_abs()))
    return worst


def torus_sample_points(tau: complex, n: int = 32) -> list[complex]:
    """Points spread over the fundamental parallelogram."""
    pts = []
    side = int(np.ceil(np.sqrt(n)))
    for i in range(side):
        for j in range(side):
            if len(pts) < n:
                pts.append((i + 0.5) / side + (j + 0.5) / side * tau)
    return pts


def check_atlas_cocycle(atlas: Atlas, tol: float = 1e-9, points=None) -> CocycleReport:
    checks: dict[str, dict] = {}
    if atlas.cover == "torus":
        points = torus_sample_points(atlas.tau) if points is None else points
        h1, ht = atlas.transitions["1"], atlas.transitions["tau"]
        a = compose(h1, ht)
        b = compose(ht, h1)
        checks["(1,tau) vs (tau,1)"] = _component_residuals(a, b, points)
        if atlas.theta_type is not None:
            from .torus import lattice_transition_from_type
            target = lattice_transition_from_type(atlas.theta_type, 1, 1, h1.L)
            checks["(1,tau) vs 1+tau"] = _component_residuals(a, target, points)
        note = "lattice generators must commute"
    elif atlas.cover == "sphere2":
        points = default_sample_points() if points is None else points
        h = atlas.transition("sou", "nor")
        back = atlas.transition("nor", "sou")
        ident = type(h).identity(h.L)
        checks["sou|nor o nor|sou"] = _component_residuals(compose(h, back), ident, points)
        checks["nor|sou o sou|nor"] = _component_residuals(compose(back, h), ident, points)
        note = "two charts have no triple overlap of distinct charts; only pair consistency is checked"
    else:
        points = default_sample_points() if points is None else points
        charts = sorted({c for key in atlas.transitions for c in key})
        note = "triple overlaps"
        for a, b, c in itertools.permutations(charts, 3):
            if (a, b) in atlas.transitions and (b, c) in atlas.transitions and (a, c) in atlas.transitions:
                lhs = compose(atlas.transitions[(a, b)], atlas.transitions[(b, c)])
                checks[f"{a}{b} o {b}{c} vs {a}{c}"] = _component_residuals(lhs, atlas.transitions[(a, c)], points)
    passed = all(v < tol for comp in checks.values() for v in comp.values())
    return CocycleReport(passed, checks, note, tol)


def consistency_compose(H_ab: N2Map, H_bc: N2Map) -> N2Map:
    """Component formulas for H_ab o H_bc written out in (f, psi+-, g+-)."""
    a, b = H_ab._h(), H_bc._h()
    F = b.f
    pp_b, pm_b = b.psi
    gp_b, gm_b = b.g
    pp_a, pm_a = (x.compose(F) for x in a.psi)
    gp_a, gm_a = (x.compose(F) for x in a.g)
    dpp_a, dpm_a = (x.derivative().compose(F) for x in a.psi)
    dgp_a, dgm_a = (x.derivative().compose(F) for x in a.g)
    prod_b = pp_b * pm_b
    f = (a.f.compose(F) + gp_a * pp_b * pm_a - gm_a * pp_a * pm_b
         + (a.psi[0] * a.psi[1]).derivative().compose(F) * prod_b)
    psi_p = pp_a + gp_a * pp_b + dpp_a * prod_b
    psi_m = pm_a + gm_a * pm_b - dpm_a * prod_b
    g_p = gp_a * gp_b + gp_b * pm_b * dpp_a * 2.0 - dgp_a * gp_b * pp_b * pm_b
    g_m = gm_a * gm_b + gm_b * pp_b * dpm_a * 2.0 - dgm_a * gm_b * pm_b * pp_b
    return N2Map(f, (psi_p, psi_m), (g_p, g_m))
