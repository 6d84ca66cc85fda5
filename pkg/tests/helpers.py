"""Random instance generators shared by the test modules."""

import numpy as np
from scipy.optimize import linprog

from wiretap_tradeoff.exponents import AuxSpec, RateTuple
from wiretap_tradeoff.measures import Channel, Distribution, compose, product_alphabet


def rand_channel(rng, nin, nout, inp=None, out=None, conc=0.5):
    inp = inp if inp is not None else tuple(range(nin))
    out = out if out is not None else tuple(range(nout))
    return Channel.from_matrix(inp, out, rng.dirichlet(np.ones(nout) * conc, size=nin))


def rand_aux(rng, nu, nxt, nx, conc_q1=0.5, conc_vt=0.3, x_alphabet=None):
    U, T = tuple(range(nu)), tuple(range(nxt))
    X = x_alphabet if x_alphabet is not None else tuple(range(nx))
    Q0 = Distribution(U, rng.dirichlet(np.ones(nu) * 3))
    Q1 = rand_channel(rng, nu, nxt, U, T, conc_q1)
    Vt = rand_channel(rng, nu * nxt, len(X), product_alphabet(U, T), X, conc_vt)
    return AuxSpec(Q0, Q1, Vt)


def degraded_instance(rng):
    """(aux, W_b, W_e) with alphabets of size 2 or 3 and W_e a degraded W_b.

    Degradation keeps a good share of instances with a non-empty region.
    """
    nu, nxt, nx, ny, nz = (int(k) for k in rng.integers(2, 4, 5))
    aux = rand_aux(rng, nu, nxt, nx, conc_q1=0.3, conc_vt=0.15)
    X = aux.x_alphabet
    W_b = rand_channel(rng, nx, ny, X, None, 0.15)
    N = rand_channel(rng, ny, nz, W_b.output_alphabet, None, 1.0)
    return aux, W_b, compose(W_b, N)


def interior_point(sys, margin, rng):
    """A random point whose strict slacks are all at least ``margin``, or None.

    Starts from the max-slack center and moves along a random direction
    inside the margin-shrunk polyhedron.
    """
    A, b, s = sys.arrays()
    d = A.shape[1]
    A2 = np.hstack([A, s[:, None].astype(float)])
    res = linprog(np.r_[np.zeros(d), -1.0], A_ub=A2, b_ub=b,
                  bounds=[(None, None)] * d + [(None, 1.0)], method="highs")
    if res.status != 0 or -res.fun < 1.5 * margin:
        return None
    c = res.x[:d]
    bm = b - margin * s
    direction = rng.standard_normal(d)
    Ad = A @ direction
    slack = np.maximum(bm - A @ c, 0.0)
    hi = min([slack[i] / Ad[i] for i in range(len(Ad)) if Ad[i] > 1e-12] + [1e9])
    lo = max([slack[i] / Ad[i] for i in range(len(Ad)) if Ad[i] < -1e-12] + [-1e9])
    return c + rng.uniform(lo, hi) * direction


def strict_slack(sys, point):
    A, b, s = sys.arrays()
    r = b - A @ np.asarray(point, dtype=float)
    return float(r[s].min()), float(r[~s].min()) if (~s).any() else np.inf


def raw_to_rates(p) -> RateTuple:
    """Map a point in (R, R_J, R_M, R_L, R_lam) to a validated RateTuple."""
    R, R_J, R_M, R_L, R_lam = (max(float(v), 0.0) for v in p)
    return RateTuple(R_M=R_M, R_L=R_L, R_lam=R_lam, R=min(R, R_L), R_J=R_J)
