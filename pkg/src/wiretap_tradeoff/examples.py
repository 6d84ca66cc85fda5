"""Small worked instances used by the CLI and the acceptance suite."""

from __future__ import annotations

from fractions import Fraction as F

from .codec import (
    Codebook,
    exact_fault_probabilities,
    optimal_list_attack,
    success_probability_guessing,
)
from .exponents import AuxSpec
from .io import aux_from_json, channels_from_json, data_path, load_json
from .measures import Channel, Distribution, bayes, compose


def erasure(p, alphabet=(0, 1), erasure_symbol="e") -> Channel:
    rows = []
    for i, _ in enumerate(alphabet):
        r = [F(0)] * (len(alphabet) + 1)
        r[i] = 1 - F(p)
        r[-1] = F(p)
        rows.append(r)
    return Channel(alphabet, tuple(alphabet) + (erasure_symbol,), rows)


def junkdata() -> dict:
    """One secret bit l and one junk bit j sent as (j, j xor l) over two uses.

    Bob sees the input noiselessly and decodes y1 xor y2; Eve sees an
    erasure channel with erasure probability 1/2 and makes one guess.
    """
    W_b = Channel.identity((0, 1))
    W_e = erasure(F(1, 2))
    sat = [[[(j, j ^ l) for j in range(2)] for l in range(2)]]
    cb = Codebook.from_codewords(sat, (0, 1))
    attack = optimal_list_attack(cb, W_e, 1)
    rep = exact_fault_probabilities(
        cb, W_b, W_e, attack,
        bob_decoder=lambda y: (0, y.symbols[0] ^ y.symbols[1]),
        eve_decoder=lambda z: 0)
    return {"e_b": rep.e_b, "s_e": rep.s_e, "eve_error": 1 - rep.s_e, "exact": rep.exact}


def perfect() -> dict:
    """Guessing a secret S from Z when the MAP guess does not depend on Z."""
    P_Z = Distribution(("z0", "z1"), [F(5, 8), F(3, 8)])
    P_S_given_Z = Channel(("z0", "z1"), ("s0", "s1"), [[F(4, 5), F(1, 5)], [F(2, 3), F(1, 3)]])
    # forward channel S -> Z recovered by Bayes' rule
    P_SZ = {(s, z): P_Z[z] * P_S_given_Z.prob(s, z) for s in P_S_given_Z.output_alphabet
            for z in P_Z.alphabet}
    prior = Distribution(("s0", "s1"), [sum(P_SZ[(s, z)] for z in P_Z.alphabet)
                                        for s in ("s0", "s1")])
    forward = Channel(("s0", "s1"), P_Z.alphabet,
                      [[P_SZ[(s, z)] / prior[s] for z in P_Z.alphabet] for s in ("s0", "s1")])
    posterior, marginal = bayes(prior, forward)
    out = {"prior": list(prior.probs)}
    for k in (1, 2):
        apriori, aposteriori = success_probability_guessing(prior, posterior, marginal, k)
        out[f"k={k}"] = {"a_priori": apriori, "a_posteriori": aposteriori}
    return out


def prefix_channels():
    """(Vt, W_b, W_e) with Vt W_e having identical rows and Vt W_b noiseless."""
    X = ("00", "01", "10", "11")
    Vt = Channel((0, 1), X, [[F(1, 3), F(2, 3), 0, 0], [0, 0, F(2, 3), F(1, 3)]])
    W_b = Channel(X, (0, 1), [[1, 0], [1, 0], [0, 1], [0, 1]])
    W_e = Channel(X, (0, 1, 2), [[1, 0, 0], [0, F(1, 2), F(1, 2)],
                                 [F(1, 2), F(1, 2), 0], [0, 0, 1]])
    return Vt, W_b, W_e


def prefix() -> dict:
    Vt, W_b, W_e = prefix_channels()
    VWb, VWe = compose(Vt, W_b), compose(Vt, W_e)
    dev = max(abs(float(a) - float(b)) for a, b in zip(VWe.rows[0], VWe.rows[1]))
    return {"VW_b": [list(r) for r in VWb.rows], "VW_e": [list(r) for r in VWe.rows],
            "max_row_deviation": dev,
            "VW_b_is_identity": VWb.rows == ((1, 0), (0, 1))}


def korner():
    """Shipped three-input example with a binary auxiliary: (W_b, W_e, aux)."""
    ch = channels_from_json(load_json(data_path("korner_channels.json")))
    aux = aux_from_json(load_json(data_path("korner_aux.json")), ch["W_b"].input_alphabet)
    return ch["W_b"], ch["W_e"], aux


def trivial_aux(W: Channel) -> AuxSpec:
    return AuxSpec.trivial(W.input_alphabet)
