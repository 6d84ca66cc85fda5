"""Rate-region constraint systems for the wiretap channel and their checks.

The raw system lives in (R, R_J, R_M, R_L, R_lam). Eliminating R and R_J
gives the reduced three-dimensional region in (R_M, R_L, R_lam). The
alternative system replaces the R_M bound by min(I(U^Y), I(U^Z)) and drops
the fourth family; mixing the auxiliary variable with the satellite
variable shows the two unions coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .exponents import AuxSpec
from .measures import (
    Channel,
    Distribution,
    JointDistribution,
    cascade,
    compose,
    cond_mutual_info,
    mutual_info,
    product_alphabet,
)
from .polytope import (
    TOL,
    Constraint,
    LinearSystem,
    Polytope,
    VertexSet,
    membership_many,
    remove_redundant,
    vertex_enumeration,
)

RAW_VARS = ("R", "R_J", "R_M", "R_L", "R_lam")
RATE_VARS = ("R_M", "R_L", "R_lam")
FAMILIES = ("r1", "r2", "r3", "r4", "r5")
CHAIN_TOL = 1e-10


@dataclass(frozen=True)
class MIQuantities:
    """I(Xt^Y|U), I(U Xt^Y), I(U^Y), I(U^Z), I(Xt^Z|U) in nats."""

    i_xt_y_given_u: float
    i_uxt_y: float
    i_u_y: float
    i_u_z: float
    i_xt_z_given_u: float

    def __post_init__(self):
        vals = (self.i_xt_y_given_u, self.i_uxt_y, self.i_u_y, self.i_u_z, self.i_xt_z_given_u)
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError("mutual informations must be finite and non-negative")
        if abs(self.i_uxt_y - self.i_u_y - self.i_xt_y_given_u) > CHAIN_TOL:
            raise ValueError("chain rule I(U Xt^Y) = I(U^Y) + I(Xt^Y|U) violated")

    @classmethod
    def from_parts(cls, i_u_y, i_xt_y_given_u, i_u_z, i_xt_z_given_u) -> "MIQuantities":
        return cls(float(i_xt_y_given_u), float(i_u_y) + float(i_xt_y_given_u),
                   float(i_u_y), float(i_u_z), float(i_xt_z_given_u))

    @property
    def i_uxt_z(self) -> float:
        return self.i_u_z + self.i_xt_z_given_u

    @property
    def largest(self) -> float:
        return max(self.i_uxt_y, self.i_uxt_z)

    def as_dict(self) -> dict:
        return {"i_xt_y_given_u": self.i_xt_y_given_u, "i_uxt_y": self.i_uxt_y,
                "i_u_y": self.i_u_y, "i_u_z": self.i_u_z,
                "i_xt_z_given_u": self.i_xt_z_given_u}


def _check_chain(W_b: Channel, W_e: Channel, aux: AuxSpec) -> None:
    if W_b.input_alphabet != W_e.input_alphabet:
        raise ValueError("W_b and W_e must share an input alphabet")
    if aux.x_alphabet != W_b.input_alphabet:
        raise ValueError("prefix output alphabet differs from the channel input alphabet")


def mi_quantities(W_b: Channel, W_e: Channel, aux: AuxSpec) -> MIQuantities:
    """The five quantities for (U, Xt) -> X -> YZ built from aux and the channels."""
    _check_chain(W_b, W_e, aux)
    out = {}
    for tag, W in (("y", W_b), ("z", W_e)):
        Wt = compose(aux.Vt, W)
        out[f"i_u_{tag}"] = mutual_info(aux.Q0, cascade(aux.Q1, Wt))
        out[f"i_xt_{tag}"] = cond_mutual_info(aux.Q0, aux.Q1, Wt)
    return MIQuantities(out["i_xt_y"], out["i_u_y"] + out["i_xt_y"], out["i_u_y"],
                        out["i_u_z"], out["i_xt_z"])


def joint_law(W_b: Channel, W_e: Channel, aux: AuxSpec) -> JointDistribution:
    """Q0(u) Q1(xt|u) Vt(x|u,xt) W_b(y|x) W_e(z|x) as a 5-axis tensor."""
    _check_chain(W_b, W_e, aux)
    q0 = aux.Q0.array
    q1 = aux.Q1.matrix
    nu, nxt = q1.shape
    vt = aux.Vt.matrix.reshape(nu, nxt, -1)
    t = np.einsum("u,ut,utx,xy,xz->utxyz", q0, q1, vt, W_b.matrix, W_e.matrix)
    t = t / t.sum()
    return JointDistribution((aux.u_alphabet, aux.xt_alphabet, aux.x_alphabet,
                              W_b.output_alphabet, W_e.output_alphabet), t)


def mi_quantities_joint(W_b: Channel, W_e: Channel, aux: AuxSpec) -> MIQuantities:
    """Second evaluation path: joint-entropy differences of the 5-axis law."""
    P = joint_law(W_b, W_e, aux)
    H = P.entropy
    U, T, Y, Z = 0, 1, 3, 4
    vals = {}
    for tag, o in (("y", Y), ("z", Z)):
        vals[f"i_u_{tag}"] = H((U,)) + H((o,)) - H((U, o))
        vals[f"i_xt_{tag}"] = H((U, T)) + H((U, o)) - H((U, T, o)) - H((U,))
    clip = {k: max(v, 0.0) for k, v in vals.items()}
    return MIQuantities(clip["i_xt_y"], clip["i_u_y"] + clip["i_xt_y"], clip["i_u_y"],
                        clip["i_u_z"], clip["i_xt_z"])


def raw_constraints(q: MIQuantities) -> LinearSystem:
    """Strict positivity conditions for the three exponents plus rate ranges."""
    rows = [
        ({"R_J": 1, "R_L": 1, "R": -1}, "<", q.i_xt_y_given_u, "R1"),
        ({"R_J": 1, "R_L": 1, "R_M": 1}, "<", q.i_uxt_y, "R2"),
        ({"R_M": 1, "R": 1}, "<", q.i_u_z, "R3"),
        ({"R_L": 1, "R": -1, "R_lam": -1}, ">", 0.0, "R4"),
        ({"R_L": 1, "R": -1, "R_J": 1, "R_lam": -1}, ">", q.i_xt_z_given_u, "R5"),
        ({"R": 1}, ">=", 0.0, "R>=0"),
        ({"R": 1, "R_L": -1}, "<=", 0.0, "R<=R_L"),
        ({"R_J": 1}, ">=", 0.0, "R_J>=0"),
        ({"R_M": 1}, ">=", 0.0, "R_M>=0"),
        ({"R_L": 1}, ">=", 0.0, "R_L>=0"),
        ({"R_lam": 1}, ">=", 0.0, "R_lam>=0"),
    ]
    return LinearSystem.build(RAW_VARS, rows)


def reduced_constraints(q: MIQuantities) -> LinearSystem:
    delta = q.i_xt_y_given_u - q.i_xt_z_given_u
    rows = [
        ({"R_lam": 1}, ">=", 0.0, "r1:R_lam>=0"),
        ({"R_lam": 1, "R_L": -1}, "<", 0.0, "r1"),
        ({"R_lam": 1}, "<", delta, "r2"),
        ({"R_M": 1}, ">=", 0.0, "r3:R_M>=0"),
        ({"R_M": 1}, "<", q.i_u_z, "r3"),
        ({"R_M": 1, "R_lam": 1}, "<", q.i_u_y + delta, "r4"),
        ({"R_M": 1, "R_L": 1}, "<", q.i_xt_y_given_u + min(q.i_u_y, q.i_u_z), "r5"),
    ]
    return LinearSystem.build(RATE_VARS, rows)


def alt_constraints(q: MIQuantities) -> LinearSystem:
    delta = q.i_xt_y_given_u - q.i_xt_z_given_u
    m = min(q.i_u_y, q.i_u_z)
    rows = [
        ({"R_lam": 1}, ">=", 0.0, "r'1:R_lam>=0"),
        ({"R_lam": 1, "R_L": -1}, "<", 0.0, "r'1"),
        ({"R_lam": 1}, "<", delta, "r'2"),
        ({"R_M": 1}, ">=", 0.0, "r'3:R_M>=0"),
        ({"R_M": 1}, "<", m, "r'3"),
        ({"R_M": 1, "R_L": 1}, "<", q.i_xt_y_given_u + m, "r'5"),
    ]
    return LinearSystem.build(RATE_VARS, rows)


def closed_reading(sys: LinearSystem) -> LinearSystem:
    """Every relation read as <=, regardless of whether the open set is empty."""
    return sys.with_constraints(
        [Constraint(c.coeffs, c.bound, False, c.label) for c in sys.constraints])


def family_of(label: str) -> str:
    """'r3:R_M>=0' -> 'r3'; derived labels keep their own text."""
    return label.split(":", 1)[0]


def mixing_aux(aux: AuxSpec, alpha) -> AuxSpec:
    """U_a equals the pair (U, Xt) with probability a and U otherwise.

    The new satellite variable is the pair (U, Xt) on U x Xt, so the
    chain U_a -> (U, Xt) -> X holds and the prefix channel is unchanged.
    """
    if isinstance(alpha, float):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
    else:
        alpha = Fraction(alpha)
        if not 0 <= alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
    U, T = aux.u_alphabet, aux.xt_alphabet
    pairs = product_alphabet(U, T)
    new_u = tuple(("u", u) for u in U) + tuple(("x", p) for p in pairs)
    q0 = [(1 - alpha) * aux.Q0.probs[i] for i in range(len(U))]
    q0 += [alpha * aux.Q0.probs[i] * aux.Q1.rows[i][j]
           for i in range(len(U)) for j in range(len(T))]
    zero = alpha * 0
    rows = []
    for i in range(len(U)):
        row = [zero] * len(pairs)
        for j in range(len(T)):
            row[i * len(T) + j] = aux.Q1.rows[i][j] + zero
        rows.append(row)
    for k in range(len(pairs)):
        row = [zero] * len(pairs)
        row[k] = zero + 1
        rows.append(row)
    Q0 = Distribution(new_u, q0)
    Q1 = Channel(new_u, pairs, rows)
    vt_rows = [aux.Vt.rows[k] for _ in new_u for k in range(len(pairs))]
    Vt = Channel(product_alphabet(new_u, pairs), aux.x_alphabet, vt_rows)
    return AuxSpec(Q0, Q1, Vt)


def mixed_quantities(q: MIQuantities, alpha: float) -> MIQuantities:
    """Quantities of the mixed auxiliary computed from q alone."""
    iy = (1 - alpha) * q.i_u_y + alpha * q.i_uxt_y
    iz = (1 - alpha) * q.i_u_z + alpha * q.i_uxt_z
    return MIQuantities.from_parts(iy, max(q.i_uxt_y - iy, 0.0), iz, max(q.i_uxt_z - iz, 0.0))


def admissible_bounds(x_size: int, y_size: int, z_size: int) -> tuple[int, int]:
    if min(x_size, y_size, z_size) < 1:
        raise ValueError("alphabet sizes must be positive")
    m = min(x_size - 1, y_size + z_size - 2)
    u_max = 4 + m
    return u_max, u_max * (2 + m)


# hull containment ----------------------------------------------------------


def classify(q: MIQuantities) -> str:
    """Which branch of the equivalence argument applies."""
    if q.i_xt_y_given_u <= q.i_xt_z_given_u:
        return "empty"
    if q.i_u_z <= q.i_u_y:
        return "less-noisy-u"
    if q.i_uxt_z <= q.i_uxt_y:
        return "ordered"
    return "z-stronger"


def mixing_alpha(q: MIQuantities) -> Optional[float]:
    case = classify(q)
    if case == "ordered":
        return (q.i_u_z - q.i_u_y) / (q.i_uxt_y - q.i_u_y)
    if case == "z-stronger":
        return (q.i_uxt_y - q.i_xt_z_given_u - q.i_u_y) / (q.i_uxt_y - q.i_u_y)
    return None


def in_hull(point, A1, b1, A2, b2, tol: float = TOL) -> bool:
    """point in conv(P1 u P2) with P_i = {A_i x <= b_i}; via p = p1 + p2 scaled."""
    p = np.asarray(point, dtype=float)
    d = len(p)
    # variables: p1 (d), lam; p2 = p - p1
    A_ub = np.vstack([np.hstack([A1, -b1[:, None]]),
                      np.hstack([-A2, b2[:, None]])])
    b_ub = np.r_[np.full(len(b1), tol), b2 - A2 @ p + tol]
    res = linprog(np.zeros(d + 1), A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * d + [(0.0, 1.0)], method="highs")
    return res.status == 0


@dataclass
class HullReport:
    case: str
    alpha: Optional[float]
    passed: bool
    points: int
    counterexamples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"case": self.case, "alpha": self.alpha, "passed": self.passed,
                "points": self.points, "counterexamples": self.counterexamples}


def _closed_arrays(sys: LinearSystem):
    A, b, _ = sys.arrays()
    return A, b


def sample_closure(sys: LinearSystem, samples: int, rng) -> np.ndarray:
    """Vertices of the closed region plus random convex combinations of them."""
    poly = Polytope.closure_of(sys)
    if poly.empty:
        return np.zeros((0, sys.dim))
    V = np.array(vertex_enumeration(poly).points)
    if len(V) == 0:
        return np.zeros((0, sys.dim))
    extra = max(samples - len(V), 0)
    W = rng.dirichlet(np.ones(len(V)) * 0.5, size=extra)
    return np.vstack([V, W @ V])[:max(samples, len(V))]


def hull_containment_check(q: MIQuantities, aux_channels=None, samples: int = 1000,
                           seed: int = 0, tol: float = 1e-8) -> HullReport:
    """Check closure(R_0) inside Hull(closure(R'_0), closure(R'_a)) on sampled points.

    ``aux_channels`` = (W_b, W_e, aux) computes the mixed quantities from an
    explicit mixing construction; otherwise the interpolation identities are used.
    """
    case = classify(q)
    rng = np.random.default_rng(seed)
    R0 = reduced_constraints(q)
    Rp0 = alt_constraints(q)
    if case == "empty":
        ok = R0.open_empty and Rp0.open_empty
        return HullReport(case, None, ok, 0)
    alpha = mixing_alpha(q)
    pts = sample_closure(R0, samples, rng)
    if case == "less-noisy-u":
        # the two systems coincide; the hull is R'_0 itself
        A1, b1 = _closed_arrays(Rp0)
        bad = [p.tolist() for p in pts if np.any(A1 @ p > b1 + tol)]
        return HullReport(case, None, not bad, len(pts), bad[:10])
    if aux_channels is not None:
        W_b, W_e, aux = aux_channels
        qa = mi_quantities(W_b, W_e, mixing_aux(aux, alpha))
    else:
        qa = mixed_quantities(q, alpha)
    Rpa = alt_constraints(qa)
    # alpha = 1 stands for the limit alpha -> 1 from below: use its closed reading
    limit = alpha >= 1.0
    A1, b1 = _closed_arrays(Rp0)
    A2, b2 = _closed_arrays(closed_reading(Rpa) if limit else Rpa)
    use1 = not Rp0.open_empty
    use2 = limit or not Rpa.open_empty
    bad = []
    for p in pts:
        if use1 and use2:
            ok = in_hull(p, A1, b1, A2, b2, tol)
        elif use1:
            ok = bool(np.all(A1 @ p <= b1 + tol))
        elif use2:
            ok = bool(np.all(A2 @ p <= b2 + tol))
        else:
            ok = False
        if not ok:
            bad.append(p.tolist())
    return HullReport(case, alpha, not bad, len(pts), bad[:10])


# rate regions ----------------------------------------------------------------


@dataclass
class RateRegion:
    """Per-aux closed polytopes in (R_M, R_L, R_lam) with a union membership oracle."""

    quantities: list
    systems: list
    polytopes: list

    def contains(self, point, tol: float = TOL) -> bool:
        return any(p.contains(point, tol) for p in self.polytopes)

    def contains_many(self, points, tol: float = TOL) -> np.ndarray:
        P = np.atleast_2d(points)
        out = np.zeros(len(P), dtype=bool)
        for s in self.systems:
            out |= membership_many(s, P, tol=tol)
        return out

    @property
    def empty(self) -> bool:
        return all(p.empty for p in self.polytopes)

    def vertices(self) -> list[VertexSet]:
        return [vertex_enumeration(p) for p in self.polytopes]


def rate_region(W_b: Channel, W_e: Channel, aux_list: Sequence[AuxSpec],
                box_cap: Optional[float] = None) -> RateRegion:
    """Closed reduced-system polytope for each aux.

    ``box_cap`` defaults to twice the largest mutual information and only
    serves to keep vertex enumeration bounded.
    """
    if not aux_list:
        raise ValueError("need at least one auxiliary specification")
    qs, systems, polys = [], [], []
    for aux in aux_list:
        q = mi_quantities(W_b, W_e, aux)
        sys = reduced_constraints(q)
        cap = box_cap if box_cap is not None else 2.0 * max(q.largest, 1e-12)
        qs.append(q)
        systems.append(sys)
        polys.append(Polytope.closure_of(sys, box_cap=cap))
    return RateRegion(qs, systems, polys)


def irredundant_families(sys: LinearSystem, tol: float = TOL) -> dict:
    """For each of r1..r5, whether its strict row survives redundancy removal."""
    kept = {c.label for c in remove_redundant(closed_reading(sys), tol).constraints}
    return {f: f in kept for f in FAMILIES}


def facet_polygons(poly: Polytope, vs: VertexSet) -> list[tuple[str, list]]:
    """Vertices of each 3-D facet in cyclic order (for plotting)."""
    if poly.system.dim != 3 or not vs.points:
        return []
    A, b, _ = poly.system.arrays()
    P = np.array(vs.points)
    out = []
    for i, c in enumerate(poly.system.constraints):
        on = P[np.abs(P @ A[i] - b[i]) <= 1e-7]
        if len(on) < 3:
            continue
        centre = on.mean(axis=0)
        n = A[i] / np.linalg.norm(A[i])
        e1 = on[0] - centre
        if np.linalg.norm(e1) < 1e-12:
            e1 = on[1] - centre
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        ang = np.arctan2((on - centre) @ e2, (on - centre) @ e1)
        ring = on[np.argsort(ang)]
        out.append((c.label, ring.tolist()))
    return out


def gnuplot_data(poly: Polytope, vs: VertexSet) -> str:
    """Closed facet polygons separated by blank lines, for `splot ... with lines`."""
    lines = [f"# {' '.join(poly.variables)}"]
    for label, ring in facet_polygons(poly, vs):
        lines.append(f"# facet {label}")
        for p in ring + ring[:1]:
            lines.append(" ".join(repr(float(x)) for x in p))
        lines.append("")
        lines.append("")
    return "\n".join(lines) + "\n"
