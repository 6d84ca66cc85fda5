"""Search small rational wiretap channels with a binary auxiliary U for which
all five reduced-region families are irredundant."""

import json
import sys
from fractions import Fraction

import numpy as np

from wiretap_tradeoff.exponents import AuxSpec
from wiretap_tradeoff.measures import Channel, Distribution
from wiretap_tradeoff.region import irredundant_families, mi_quantities, reduced_constraints

DEN = 4
rng = np.random.default_rng(int(sys.argv[1]) if len(sys.argv) > 1 else 0)


def rand_row(k, den=DEN):
    cuts = sorted(rng.integers(0, den + 1, size=k - 1))
    parts = np.diff([0, *cuts, den])
    return [Fraction(int(p), den) for p in parts]


X = (0, 1, 2)
best = None
for trial in range(20000):
    Wb = Channel(X, (0, 1, 2), [rand_row(3) for _ in X])
    We = Channel(X, (0, 1), [rand_row(2) for _ in X])
    Q0 = Distribution(("a", "b"), [Fraction(1, 2), Fraction(1, 2)])
    Q1 = Channel(("a", "b"), X, [rand_row(3), rand_row(3)])
    aux = AuxSpec(Q0, Q1, Channel.identity(X).extend(("a", "b")))
    q = mi_quantities(Wb, We, aux)
    d = q.i_xt_y_given_u - q.i_xt_z_given_u
    if not (q.i_u_y + 0.02 < q.i_u_z < q.i_u_y + d - 0.02 and d > 0.05):
        continue
    fam = irredundant_families(reduced_constraints(q))
    if all(fam.values()):
        print(trial, q)
        print(json.dumps({"W_b": [[str(p) for p in r] for r in Wb.rows],
                          "W_e": [[str(p) for p in r] for r in We.rows],
                          "Q1": [[str(p) for p in r] for r in Q1.rows]}))
        break
