"""Lower bounds on the error and success exponents of the junk-data random code.

Each bound has the form

    min over V in P(out)^(U x Xt) of  D(V || Vt W | Q) + gamma(V)

with Q = Q0 o Q1 on U x Xt. The minimum is searched numerically: a
uniform grid on each conditional row drives a block coordinate descent
from several starting points, then a pattern search with step halving
polishes the best point. Returned values are therefore upper bounds on
the true minimum (exact at the returned minimizer) and are labelled
inner-bound exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .measures import (
    Channel,
    Distribution,
    cascade,
    compose,
    cond_mutual_info,
    direct_product,
    mutual_info,
    product_alphabet,
)
from .typeclasses import compositions

CASES = ("bob", "eve", "secrecy")


@dataclass(frozen=True)
class RateTuple:
    """Rates in nats per channel use; R is the reallocated part of R_L."""

    R_M: float
    R_L: float
    R_lam: float
    R: float = 0.0
    R_J: float = 0.0

    def __post_init__(self):
        vals = (self.R_M, self.R_L, self.R_lam, self.R, self.R_J)
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError("rates must be finite and non-negative")
        if self.R > self.R_L:
            raise ValueError("need 0 <= R <= R_L")


@dataclass(frozen=True)
class AuxSpec:
    """Auxiliary distributions: Q0 on U, Q1: U -> Xt and prefix Vt: U x Xt -> X."""

    Q0: Distribution
    Q1: Channel
    Vt: Channel

    def __post_init__(self):
        if self.Q1.input_alphabet != self.Q0.alphabet:
            raise ValueError("Q1 must be indexed by the alphabet of Q0")
        if self.Vt.input_alphabet != product_alphabet(self.Q0.alphabet, self.Q1.output_alphabet):
            raise ValueError("prefix channel must be indexed by U x Xt")

    @classmethod
    def trivial(cls, x_alphabet, input_dist: Optional[Distribution] = None) -> "AuxSpec":
        """|U| = 1, Xt = X, noiseless prefix; ``input_dist`` defaults to uniform."""
        x_alphabet = tuple(x_alphabet)
        if input_dist is None:
            input_dist = Distribution.uniform(x_alphabet)
        Q0 = Distribution(("*",), [1])
        Q1 = Channel(("*",), x_alphabet, [input_dist.probs])
        return cls(Q0, Q1, Channel.identity(x_alphabet).extend(("*",)))

    @property
    def u_alphabet(self) -> tuple:
        return self.Q0.alphabet

    @property
    def xt_alphabet(self) -> tuple:
        return self.Q1.output_alphabet

    @property
    def x_alphabet(self) -> tuple:
        return self.Vt.output_alphabet

    @property
    def Q(self) -> Distribution:
        return direct_product(self.Q0, self.Q1)

    def effective(self, W: Channel) -> Channel:
        """Vt W on U x Xt."""
        return compose(self.Vt, W)


@dataclass(frozen=True)
class ExponentTriple:
    E_b: float
    E_e: float
    S_e: float
    details: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if min(self.E_b, self.E_e, self.S_e) < 0:
            raise ValueError("exponents are non-negative")


@dataclass(frozen=True)
class ExponentBound:
    value: float
    minimizer: Channel
    tolerance: float
    case: str

    @property
    def interval(self) -> tuple:
        return (max(self.value - self.tolerance, 0.0), self.value)


def _pos(a):
    return np.maximum(a, 0.0)


def _neg(a):
    return np.minimum(a, 0.0)


def _info_terms(V: Channel, aux: AuxSpec) -> tuple[float, float]:
    """(I(Q1,V|Q0), I(Q0,Q1V)) for a test channel V on U x Xt."""
    a = cond_mutual_info(aux.Q0, aux.Q1, V)
    b = mutual_info(aux.Q0, cascade(aux.Q1, V))
    return a, b


def gamma_bob(V: Channel, aux: AuxSpec, r: RateTuple) -> float:
    a, b = _info_terms(V, aux)
    return float(_pos(a - r.R_J - r.R_L + r.R + _neg(b - r.R_M - r.R)))


def gamma_eve(V: Channel, aux: AuxSpec, r: RateTuple) -> float:
    _, b = _info_terms(V, aux)
    return float(_pos(b - r.R_M - r.R))


def gamma_secrecy(V: Channel, aux: AuxSpec, r: RateTuple) -> float:
    a, _ = _info_terms(V, aux)
    return float(_pos(r.R_L - r.R - r.R_lam + _neg(r.R_J - a)))


GAMMAS = {"bob": gamma_bob, "eve": gamma_eve, "secrecy": gamma_secrecy}


def _pieces(case: str, r: RateTuple) -> list[tuple]:
    """gamma = min_i |wa*A + wb*B + c_i|^+ with A = I(Q1,V|Q0), B = I(Q0,Q1V)."""
    if case == "bob":
        c1 = r.R_J + r.R_L - r.R
        c2 = r.R_M + r.R
        return [(1.0, 1.0, -c1 - c2), (1.0, 0.0, -c1)]
    if case == "eve":
        return [(0.0, 1.0, -r.R_M - r.R)]
    if case == "secrecy":
        c = r.R_L - r.R - r.R_lam
        return [(-1.0, 0.0, c + r.R_J), (0.0, 0.0, c)]
    raise ValueError(f"unknown case {case!r}; expected one of {CASES}")


def _xlogy_rows(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)


class _Objective:
    """Batched D(V||W|Q) + |wa*A + wb*B + c|^+ over V of shape (B, K, O)."""

    def __init__(self, q0, q1, W, piece):
        self.q0 = q0
        self.q1 = q1
        self.nu, self.nxt = q1.shape
        self.q = (q0[:, None] * q1).ravel()
        self.W = W
        with np.errstate(divide="ignore"):
            self.logW = np.log(W)
        self.wa, self.wb, self.c = piece

    def __call__(self, V):
        V = np.asarray(V)
        bad = np.any((V > 0) & (self.W[None] <= 0) & (self.q[None, :, None] > 0), axis=(1, 2))
        vlogv = _xlogy_rows(V)
        safe_logW = np.where(self.W > 0, self.logW, 0.0)
        d = np.einsum("k,bko->b", self.q, vlogv - V * safe_logW[None])
        value = d
        if self.wa or self.wb:
            h_v = -np.einsum("k,bko->b", self.q, vlogv)
            qv = np.einsum("ux,buxo->buo", self.q1, V.reshape(len(V), self.nu, self.nxt, -1))
            h_qv = -np.einsum("u,buo->b", self.q0, _xlogy_rows(qv))
            marg = np.einsum("u,buo->bo", self.q0, qv)
            h_m = -_xlogy_rows(marg).sum(axis=1)
            a = h_qv - h_v
            b = h_m - h_qv
            value = d + _pos(self.wa * a + self.wb * b + self.c)
        else:
            value = d + max(self.c, 0.0)
        return np.where(bad, np.inf, value)


def _row_grid(nout: int, step: float) -> np.ndarray:
    k = max(1, int(round(1.0 / step)))
    # keep the grid to a few thousand points per row
    while math.comb(k + nout - 1, nout - 1) > 5000 and k > 1:
        k //= 2
    return np.array(list(compositions(k, nout)), dtype=float) / k


def _coordinate_descent(f, V, active, grid, max_sweeps=50):
    best = f(V[None])[0]
    for _ in range(max_sweeps):
        improved = False
        for k in active:
            cand = np.repeat(V[None], len(grid), axis=0)
            cand[:, k, :] = grid
            vals = f(cand)
            i = int(np.argmin(vals))
            if vals[i] < best - 1e-15:
                best, V = vals[i], cand[i]
                improved = True
        if not improved:
            break
    return V, best


def _directions(active, nout, K, rng, n_random=16):
    dirs = []
    for k in active:
        for i in range(nout):
            for o in range(nout):
                if i != o:
                    d = np.zeros((K, nout))
                    d[k, i], d[k, o] = 1.0, -1.0
                    dirs.append(d)
    for _ in range(n_random if len(active) > 1 or nout > 2 else 0):
        d = np.zeros((K, nout))
        for k in active:
            g = rng.standard_normal(nout)
            d[k] = g - g.mean()
        d /= np.abs(d).max()
        dirs.append(d)
    return np.array(dirs)


def _pattern_search(f, V, best, dirs, step, tol, max_iter=10000):
    """Best-of-directions moves; the step doubles after a success and halves after a failure."""
    s = step
    it = 0
    slope = 0.0
    while s >= tol and it < max_iter:
        it += 1
        cand = V[None] + s * dirs
        cand = np.clip(cand, 0.0, None)
        cand /= cand.sum(axis=2, keepdims=True)
        vals = f(cand)
        i = int(np.argmin(vals))
        if vals[i] < best - 1e-15:
            best, V = vals[i], cand[i]
            s = min(2 * s, step)
        else:
            finite = vals[np.isfinite(vals)]
            if finite.size:
                slope = float(np.max(np.abs(finite - best)) / s)
            s /= 2
    return V, best, slope * max(s, tol)


def exponent_bound(W: Channel, aux: AuxSpec, gamma: str, r: RateTuple,
                   grid: float = 1 / 32, tol: float = 1e-6, starts: int = 4,
                   seed: int = 0) -> ExponentBound:
    """min_V D(V || Vt W | Q) + gamma(V) for gamma in {"bob", "eve", "secrecy"}.

    ``grid`` is the row-grid step, ``tol`` the final pattern-search step.
    """
    if grid <= 0 or tol <= 0:
        raise ValueError("grid resolution and tolerance must be positive")
    if W.input_alphabet != aux.x_alphabet:
        raise ValueError("channel input alphabet differs from the prefix output alphabet")
    Wt = aux.effective(W)
    Wm = Wt.matrix
    K, nout = Wm.shape
    q0 = aux.Q0.array
    q1 = aux.Q1.matrix
    qk = (q0[:, None] * q1).ravel()
    active = [k for k in range(K) if qk[k] > 0]
    rgrid = _row_grid(nout, grid)
    rng = np.random.default_rng(seed)
    dirs = _directions(active, nout, K, rng)

    starts_list = [Wm.copy()]
    for _ in range(starts):
        V = Wm.copy()
        for k in active:
            V[k] = rng.dirichlet(np.ones(nout))
        starts_list.append(V)

    best_val, best_V, best_tol = math.inf, Wm.copy(), 0.0
    for piece in _pieces(gamma, r):
        f = _Objective(q0, q1, Wm, piece)
        if piece[0] == 0 and piece[1] == 0:
            val = max(piece[2], 0.0)
            if val < best_val:
                best_val, best_V, best_tol = val, Wm.copy(), 0.0
            continue
        for V0 in starts_list:
            V, val = _coordinate_descent(f, V0.copy(), active, rgrid)
            if not math.isfinite(val):
                continue
            V, val, t = _pattern_search(f, V, val, dirs, grid, tol)
            if val < best_val - 1e-15:
                best_val, best_V, best_tol = float(val), V, t
    best_V = best_V / best_V.sum(axis=1, keepdims=True)
    minimizer = Channel.from_matrix(Wt.input_alphabet, Wt.output_alphabet, best_V)
    return ExponentBound(max(float(best_val), 0.0), minimizer, best_tol, gamma)


def objective_value(W: Channel, aux: AuxSpec, gamma: str, r: RateTuple, V: Channel) -> float:
    """D(V || Vt W | Q) + gamma(V) evaluated through the scalar measures."""
    from .measures import divergence

    d = divergence(V, aux.effective(W), aux.Q)
    return d + GAMMAS[gamma](V, aux, r)


def exponent_triple(W_b: Channel, W_e: Channel, aux: AuxSpec, r: RateTuple,
                    grid: float = 1 / 32, tol: float = 1e-6) -> ExponentTriple:
    eb = exponent_bound(W_b, aux, "bob", r, grid, tol)
    ee = exponent_bound(W_e, aux, "eve", r, grid, tol)
    se = exponent_bound(W_e, aux, "secrecy", r, grid, tol)
    return ExponentTriple(eb.value, ee.value, se.value,
                          details={"bob": eb, "eve": ee, "secrecy": se})
