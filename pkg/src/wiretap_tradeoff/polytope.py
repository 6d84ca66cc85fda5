"""Affine inequality systems: Fourier-Motzkin elimination, redundancy removal,
projection, membership and vertex enumeration.

Coefficients are floats. Every derived constraint is scaled to unit
max-|coefficient| and compared with an absolute tolerance (default 1e-9).
Strict inequalities are carried as flags. A system with strict constraints
describes a relatively open set; the closure of a nonempty such set is the
same system with every relation read as <=, and the closure of an empty
one is empty. Closed membership follows that rule.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

TOL = 1e-9
FM_CAP = 10**5
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class BlowupError(RuntimeError):
    """Fourier-Motzkin produced more constraints than the configured cap."""


@dataclass(frozen=True)
class Constraint:
    """coeffs . x <= bound (or < when strict)."""

    coeffs: tuple
    bound: float
    strict: bool = False
    label: str = ""

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not all(math.isfinite(c) for c in coeffs) or not math.isfinite(float(self.bound)):
            raise ValueError("constraint coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "bound", float(self.bound))
        object.__setattr__(self, "strict", bool(self.strict))

    @property
    def relation(self) -> str:
        return "<" if self.strict else "<="

    def is_trivial(self, tol: float = TOL) -> bool:
        return max((abs(c) for c in self.coeffs), default=0.0) <= tol

    def normalized(self, tol: float = TOL) -> "Constraint":
        scale = max((abs(c) for c in self.coeffs), default=0.0)
        if scale <= tol:
            return Constraint((0.0,) * len(self.coeffs), self.bound, self.strict, self.label)
        return Constraint(tuple(c / scale for c in self.coeffs), self.bound / scale,
                          self.strict, self.label)

    def value(self, point) -> float:
        return float(np.dot(self.coeffs, point))

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "relation": self.relation,
                "bound": self.bound, "label": self.label}

    @classmethod
    def from_json(cls, d: dict) -> "Constraint":
        if d.get("relation", "<=") not in ("<", "<="):
            raise ValueError(f"unknown relation {d['relation']!r}")
        return cls(tuple(d["coeffs"]), d["bound"], d.get("relation") == "<", d.get("label", ""))


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple
    constraints: tuple = ()

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        constraints = tuple(self.constraints)
        for c in constraints:
            if len(c.coeffs) != len(variables):
                raise ValueError("coefficient vector length differs from the variable count")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", constraints)

    @classmethod
    def build(cls, variables, rows: Iterable) -> "LinearSystem":
        """rows: (dict var->coef, relation, bound[, label])."""
        variables = tuple(variables)
        out = []
        for row in rows:
            terms, rel, bound = row[:3]
            label = row[3] if len(row) > 3 else ""
            if rel not in ("<", "<=", ">", ">="):
                raise ValueError(f"unknown relation {rel!r}")
            unknown = set(terms) - set(variables)
            if unknown:
                raise ValueError(f"unknown variables {sorted(unknown)}")
            sign = -1.0 if rel in (">", ">=") else 1.0
            coeffs = [sign * terms.get(v, 0.0) for v in variables]
            out.append(Constraint(coeffs, sign * bound, rel in ("<", ">"), label))
        return cls(variables, out)

    def index(self, var) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise KeyError(f"variable {var!r} not in system") from None

    @property
    def dim(self) -> int:
        return len(self.variables)

    def arrays(self):
        m, d = len(self.constraints), self.dim
        A = np.array([c.coeffs for c in self.constraints], dtype=float).reshape(m, d)
        b = np.array([c.bound for c in self.constraints], dtype=float)
        s = np.array([c.strict for c in self.constraints], dtype=bool)
        return A, b, s

    def with_constraints(self, constraints) -> "LinearSystem":
        return LinearSystem(self.variables, tuple(constraints))

    @cached_property
    def open_empty(self) -> bool:
        return is_open_empty(self)

    def to_json(self) -> dict:
        return {"variables": list(self.variables),
                "constraints": [c.to_json() for c in self.constraints]}

    @classmethod
    def from_json(cls, d: dict) -> "LinearSystem":
        return cls(tuple(d["variables"]), tuple(Constraint.from_json(c) for c in d["constraints"]))

    def __str__(self) -> str:
        lines = []
        for c in self.constraints:
            terms = " + ".join(f"{a:g}*{v}" for a, v in zip(c.coeffs, self.variables) if a)
            lines.append(f"{terms or '0'} {c.relation} {c.bound:g}" + (f"   [{c.label}]" if c.label else ""))
        return "\n".join(lines)


def _linprog(c, A, b, bounds=(None, None)):
    A = A if len(A) else None
    b = b if A is not None else None
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs", options=_HIGHS)
    if res.status == 2:
        # presolve may report "infeasible" for unbounded problems
        res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs",
                      options={**_HIGHS, "presolve": False})
    return res


def max_slack(sys: LinearSystem, cap: float = 1.0) -> float:
    """max t with a.x + t <= b on strict rows, a.x <= b on the rest (t <= cap).

    Returns -inf when even the closed system is infeasible.
    """
    A, b, s = sys.arrays()
    if len(A) == 0:
        return cap
    d = sys.dim
    A2 = np.hstack([A, s[:, None].astype(float)])
    # t also bounded by the non-strict rows being satisfiable
    res = _linprog(np.r_[np.zeros(d), -1.0], A2, b, bounds=[(None, None)] * d + [(None, cap)])
    if res.status == 2:
        return -math.inf
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    return float(-res.fun)


def is_open_empty(sys: LinearSystem, tol: float = TOL) -> bool:
    """True when no point satisfies every constraint (strict ones strictly)."""
    if not any(c.strict for c in sys.constraints):
        return max_slack(sys) == -math.inf
    return max_slack(sys) <= tol


def _canonical_key(c: Constraint):
    return (tuple(round(x, 12) for x in c.coeffs), round(c.bound, 12), c.strict)


def fm_eliminate(sys: LinearSystem, var, tol: float = TOL, cap: int = FM_CAP) -> LinearSystem:
    """Fourier-Motzkin elimination of one variable.

    A derived row is strict iff one of its two parents is strict. Rows with
    all-zero coefficients that hold trivially are dropped; violated ones are
    kept so that emptiness survives elimination.
    """
    k = sys.index(var)
    pos, neg, zero = [], [], []
    for c in sys.constraints:
        a = c.coeffs[k]
        (pos if a > tol else neg if a < -tol else zero).append(c)
    if len(zero) + len(pos) * len(neg) > cap:
        raise BlowupError(f"elimination of {var!r} would create more than {cap} constraints")

    def drop(c: Constraint) -> Constraint:
        return Constraint(c.coeffs[:k] + c.coeffs[k + 1:], c.bound, c.strict, c.label)

    derived = [drop(c) for c in zero]
    for p in pos:
        for q in neg:
            ap, aq = p.coeffs[k], -q.coeffs[k]
            coeffs = [x / ap + y / aq for x, y in zip(p.coeffs, q.coeffs)]
            label = f"{p.label}+{q.label}" if (p.label or q.label) else ""
            derived.append(drop(Constraint(coeffs, p.bound / ap + q.bound / aq,
                                           p.strict or q.strict, label)))
    out, seen = [], set()
    for c in derived:
        c = c.normalized(tol)
        if c.is_trivial(tol):
            holds = c.bound > tol if c.strict else c.bound >= -tol
            if holds:
                continue
        key = _canonical_key(c)
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    variables = sys.variables[:k] + sys.variables[k + 1:]
    return LinearSystem(variables, out)


def remove_redundant(sys: LinearSystem, tol: float = TOL) -> LinearSystem:
    """Drop constraints whose removal leaves the closed solution set unchanged.

    Each candidate is tested by maximizing its left side over the remaining
    rows. When a strict row is dropped in favour of an identical non-strict
    one, the survivor inherits the strict flag. An empty system collapses
    to the single row 0 < 0.
    """
    if sys.open_empty:
        return sys.with_constraints([Constraint((0.0,) * sys.dim, 0.0, True, "empty")])
    rows = [c.normalized(tol) for c in sys.constraints]
    keep = [not r.is_trivial(tol) for r in rows]
    for i, r in enumerate(rows):
        if not keep[i]:
            continue
        others = [j for j in range(len(rows)) if keep[j] and j != i]
        # the extra row r.x <= bound + 1 keeps the objective bounded
        A = np.array([rows[j].coeffs for j in others] + [r.coeffs], dtype=float)
        b = np.array([rows[j].bound for j in others] + [r.bound + 1.0], dtype=float)
        res = _linprog(-np.array(r.coeffs), A, b)
        if res.status != 0:
            raise RuntimeError(f"LP failed: {res.message}")
        top = -res.fun
        if top <= r.bound + tol:
            keep[i] = False
            if r.strict and top >= r.bound - tol:
                for j in others:
                    q = rows[j]
                    if (np.allclose(q.coeffs, r.coeffs, atol=tol)
                            and abs(q.bound - r.bound) <= tol and not q.strict):
                        rows[j] = Constraint(q.coeffs, q.bound, True, q.label or r.label)
    return sys.with_constraints([r for r, k in zip(rows, keep) if k])


def project(sys: LinearSystem, keep: Sequence, tol: float = TOL) -> LinearSystem:
    """Project onto ``keep`` (in the given order) by repeated elimination."""
    missing = set(keep) - set(sys.variables)
    if missing:
        raise KeyError(f"unknown variables {sorted(missing)}")
    out = remove_redundant(sys, tol)
    for v in [v for v in sys.variables if v not in keep]:
        out = remove_redundant(fm_eliminate(out, v, tol), tol)
    order = [out.index(v) for v in keep]
    return LinearSystem(tuple(keep), [Constraint([c.coeffs[i] for i in order], c.bound,
                                                 c.strict, c.label) for c in out.constraints])


def membership(sys: LinearSystem, point, strict: bool = False, tol: float = TOL) -> bool:
    """Closed (default) or strict membership of a point."""
    x = np.asarray(point, dtype=float)
    if x.shape != (sys.dim,):
        raise ValueError("point dimension differs from the system")
    if not strict and sys.open_empty:
        return False
    for c in sys.constraints:
        v = c.value(x)
        if strict and c.strict:
            if not v < c.bound - tol:
                return False
        elif v > c.bound + tol:
            return False
    return True


def membership_many(sys: LinearSystem, points, strict: bool = False, tol: float = TOL) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if not strict and sys.open_empty:
        return np.zeros(len(P), dtype=bool)
    A, b, s = sys.arrays()
    if len(A) == 0:
        return np.ones(len(P), dtype=bool)
    vals = P @ A.T
    ok = vals <= b + tol
    if strict:
        ok = np.where(s, vals < b - tol, ok)
    return ok.all(axis=1)


@dataclass(frozen=True)
class Polytope:
    """Closed H-representation of the closure of a LinearSystem."""

    system: LinearSystem
    strict_labels: tuple = ()
    boxed: bool = False
    empty: bool = False

    @classmethod
    def closure_of(cls, sys: LinearSystem, box_cap: Optional[float] = None,
                   tol: float = TOL) -> "Polytope":
        empty = sys.open_empty
        rows = list(sys.constraints)
        if box_cap is not None:
            for i, v in enumerate(sys.variables):
                e = [0.0] * sys.dim
                e[i] = 1.0
                rows.append(Constraint(e, box_cap, False, f"box:{v}"))
        reduced = remove_redundant(sys.with_constraints(rows), tol)
        strict = tuple(c.label for c in reduced.constraints if c.strict)
        closed = reduced.with_constraints(
            [Constraint(c.coeffs, c.bound, False, c.label) for c in reduced.constraints])
        return cls(closed, strict, box_cap is not None, empty)

    @property
    def variables(self) -> tuple:
        return self.system.variables

    @property
    def facets(self) -> tuple:
        return () if self.empty else self.system.constraints

    def contains(self, point, tol: float = TOL) -> bool:
        return not self.empty and membership(self.system, point, tol=tol)

    def to_json(self) -> dict:
        d = self.system.to_json()
        d.update({"strict_labels": list(self.strict_labels), "boxed": self.boxed,
                  "empty": self.empty})
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Polytope":
        return cls(LinearSystem.from_json(d), tuple(d.get("strict_labels", ())),
                   bool(d.get("boxed", False)), bool(d.get("empty", False)))


@dataclass(frozen=True)
class VertexSet:
    variables: tuple
    points: tuple
    incidence: tuple = field(default=())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.variables)
        for p in self.points:
            w.writerow([repr(float(x)) for x in p])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"variables": list(self.variables), "points": [list(p) for p in self.points],
                "incidence": [list(i) for i in self.incidence]}


def vertex_enumeration(p: Polytope, tol: float = TOL, max_dim: int = 6) -> VertexSet:
    """All vertices by exhaustive active sets of size d with a rank check."""
    d = p.system.dim
    if d > max_dim:
        raise ValueError(f"vertex enumeration limited to {max_dim} dimensions")
    if p.empty:
        return VertexSet(p.variables, ())
    A, b, _ = p.system.arrays()
    found: dict = {}
    for idx in itertools.combinations(range(len(A)), d):
        M = A[list(idx)]
        if np.linalg.matrix_rank(M, tol=1e-12) < d:
            continue
        x = np.linalg.solve(M, b[list(idx)])
        if np.any(A @ x > b + 1e-9 * max(1.0, np.abs(b).max())):
            continue
        key = tuple(np.round(x, 9) + 0.0)
        if key not in found:
            found[key] = x + 0.0
    ordered = sorted(found.items())
    points = tuple(tuple(float(v) for v in x) for _, x in ordered)
    inc = tuple(tuple(int(i) for i in np.nonzero(np.abs(A @ np.array(x) - b) <= 1e-7)[0])
                for x in points)
    return VertexSet(p.variables, points, inc)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
