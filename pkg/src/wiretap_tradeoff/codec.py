"""Desk-scale transmission model: random constant-composition codes with junk
data, MMI decoders, list-decoding attacks and exact fault probabilities.

Indices ``j``, ``l`` and ``m`` are 0-based throughout. Sequences are
handled as index tuples internally and exposed as ``Sequence`` objects.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .measures import Channel, Distribution, product_alphabet
from .typeclasses import (
    CondType,
    Sequence,
    TypeVector,
    canonical_cond_type,
    concat,
    empirical_type,
    enumerate_type_class,
    shell_indices,
    shell_membership_probability,
    shell_size,
)

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An exact enumeration would exceed the configured sequence budget."""


def default_budget() -> int:
    return int(os.environ.get("WIRETAP_BUDGET", DEFAULT_BUDGET))


def _check_budget(count: int, budget: Optional[int], what: str) -> None:
    budget = default_budget() if budget is None else budget
    if count > budget:
        raise BudgetExceeded(f"{what}: {count} sequences exceed the budget of {budget}")


@dataclass(frozen=True)
class Codebook:
    """Codewords c_jlm = u_m o x_jlm.

    ``satellites[m][l][j]`` is x_jlm. ``Q0``/``Q1`` are ``None`` for a
    hand-made code that is not constant composition.
    """

    n: int
    J: int
    L: int
    M: int
    u_alphabet: tuple
    x_alphabet: tuple
    cloud_centers: tuple
    satellites: tuple
    Q0: Optional[TypeVector] = None
    Q1: Optional[CondType] = None

    def __post_init__(self):
        if min(self.J, self.L, self.M) < 1:
            raise ValueError("J, L and M must be positive")
        if len(self.cloud_centers) != self.M or len(self.satellites) != self.M:
            raise ValueError("need one cloud center and satellite block per public message")
        for m, u in enumerate(self.cloud_centers):
            if u.n != self.n or u.alphabet != self.u_alphabet:
                raise ValueError(f"cloud center {m} has wrong length or alphabet")
            if len(self.satellites[m]) != self.L:
                raise ValueError("satellite block must have L rows")
            for l in range(self.L):
                row = self.satellites[m][l]
                if len(row) != self.J:
                    raise ValueError("satellite row must have J entries")
                for x in row:
                    if x.n != self.n or x.alphabet != self.x_alphabet:
                        raise ValueError("satellite has wrong length or alphabet")
        if self.Q0 is not None:
            for u in self.cloud_centers:
                if empirical_type(u) != self.Q0:
                    raise ValueError("cloud center outside the type class of Q0")
        if self.Q1 is not None:
            for m, u in enumerate(self.cloud_centers):
                for row in self.satellites[m]:
                    for x in row:
                        if canonical_cond_type(u, x) != self.Q1:
                            raise ValueError("satellite outside the Q1-shell of its cloud center")

    @classmethod
    def from_codewords(cls, satellites, x_alphabet, cloud_centers=None, u_alphabet=(0,)):
        """Build from nested ``satellites[m][l][j]`` symbol lists.

        Without cloud centers the U alphabet is a single dummy symbol.
        """
        x_alphabet = tuple(x_alphabet)
        u_alphabet = tuple(u_alphabet)
        sats = tuple(tuple(tuple(Sequence(x, x_alphabet) for x in row) for row in block)
                     for block in satellites)
        n = sats[0][0][0].n
        if cloud_centers is None:
            centers = tuple(Sequence([u_alphabet[0]] * n, u_alphabet) for _ in sats)
        else:
            centers = tuple(Sequence(u, u_alphabet) for u in cloud_centers)
        return cls(n=n, J=len(sats[0][0]), L=len(sats[0]), M=len(sats),
                   u_alphabet=u_alphabet, x_alphabet=x_alphabet,
                   cloud_centers=centers, satellites=sats)

    def codeword(self, j: int, l: int, m: int) -> Sequence:
        return concat(self.cloud_centers[m], self.satellites[m][l][j])

    def indices(self):
        """(j, l, m) triples in storage order."""
        return [(j, l, m) for m in range(self.M) for l in range(self.L) for j in range(self.J)]


def _uniform_arrangement(counts, rng) -> list:
    pool = [i for i, c in enumerate(counts) for _ in range(c)]
    return [pool[k] for k in rng.permutation(len(pool))]


def _uniform_shell_member(u_idx, counts, rng) -> list:
    out = [0] * len(u_idx)
    for a, row in enumerate(counts):
        pos = [i for i, s in enumerate(u_idx) if s == a]
        fill = _uniform_arrangement(row, rng)
        for p, s in zip(pos, fill):
            out[p] = s
    return out


def sample_random_code(Q0: TypeVector, Q1: CondType, J: int, L: int, M: int,
                       seed=None) -> Codebook:
    """u_m uniform on T_Q0, x_jlm conditionally uniform on T_Q1(u_m), all independent."""
    if Q1.input_alphabet != Q0.alphabet:
        raise ValueError("Q1 must be conditioned on the alphabet of Q0")
    if Q1.row_totals != Q0.counts:
        raise ValueError("Q1 rows are inconsistent with Q0 counts: empty shell")
    rng = np.random.default_rng(seed)
    centers, sats = [], []
    for _ in range(M):
        u_idx = _uniform_arrangement(Q0.counts, rng)
        centers.append(Sequence.from_indices(u_idx, Q0.alphabet))
        sats.append(tuple(
            tuple(Sequence.from_indices(_uniform_shell_member(u_idx, Q1.counts, rng),
                                        Q1.output_alphabet) for _ in range(J))
            for _ in range(L)))
    return Codebook(n=Q0.n, J=J, L=L, M=M, u_alphabet=Q0.alphabet,
                    x_alphabet=Q1.output_alphabet, cloud_centers=tuple(centers),
                    satellites=tuple(sats), Q0=Q0, Q1=Q1)


def encoder_distribution(cb: Codebook, m: int, l: int, budget=None) -> Distribution:
    """f(.|m,l): mass 1/J on each x_jlm, over all of X^n (labels are symbol tuples)."""
    _check_budget(len(cb.x_alphabet) ** cb.n, budget, "encoder distribution")
    mass = Counter(cb.satellites[m][l][j].symbols for j in range(cb.J))
    support = list(product(cb.x_alphabet, repeat=cb.n))
    return Distribution(support, [Fraction(mass.get(x, 0), cb.J) for x in support])


def mmi_key(pair_counts) -> Fraction:
    """exp(n I) for joint counts N(a,b), exact. Monotone in the empirical MI."""
    n = sum(sum(r) for r in pair_counts)
    rows = [sum(r) for r in pair_counts]
    cols = [sum(c) for c in zip(*pair_counts)]
    num = n**n
    for r in pair_counts:
        for c in r:
            if c:
                num *= c**c
    den = 1
    for c in rows + cols:
        if c:
            den *= c**c
    return Fraction(num, den)


def _counts(a_idx, b_idx, na, nb):
    counts = [[0] * nb for _ in range(na)]
    for i, j in zip(a_idx, b_idx):
        counts[i][j] += 1
    return counts


def _unique_argmax(keys) -> Optional[int]:
    best = max(keys)
    hits = [i for i, k in enumerate(keys) if k == best]
    return hits[0] if len(hits) == 1 else None


class _Decoders:
    """Cached MMI decisions for one codebook."""

    def __init__(self, cb: Codebook):
        self.cb = cb
        nx = len(cb.x_alphabet)
        self.triples = cb.indices()
        self.code_idx = [tuple(u * nx + x for u, x in zip(cb.cloud_centers[m].indices,
                                                          cb.satellites[m][l][j].indices))
                         for j, l, m in self.triples]
        self.nc = len(cb.u_alphabet) * nx
        self.u_idx = [u.indices for u in cb.cloud_centers]

    def bob(self, y_idx, ny) -> Optional[tuple]:
        keys = [mmi_key(_counts(c, y_idx, self.nc, ny)) for c in self.code_idx]
        k = _unique_argmax(keys)
        if k is None:
            return None
        j, l, m = self.triples[k]
        return (m, l)

    def eve(self, z_idx, nz) -> Optional[int]:
        keys = [mmi_key(_counts(u, z_idx, len(self.cb.u_alphabet), nz)) for u in self.u_idx]
        return _unique_argmax(keys)


def mmi_decode_bob(cb: Codebook, y: Sequence) -> Optional[tuple]:
    """(m, l) of the unique codeword maximizing I(c ^ y); ``None`` on ties."""
    return _Decoders(cb).bob(y.indices, len(y.alphabet))


def mmi_decode_eve(cb: Codebook, z: Sequence) -> Optional[int]:
    """m of the unique cloud center maximizing I(u_m ^ z); ``None`` on ties."""
    return _Decoders(cb).eve(z.indices, len(z.alphabet))


@dataclass(frozen=True)
class AttackRegions:
    """Deterministic list decoder psi: Z^n -> subsets of {0..L-1} of size lam."""

    lam: int
    L: int
    n: int
    z_alphabet: tuple
    table: Mapping = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.lam <= self.L:
            raise ValueError("list size must satisfy 1 <= lam <= L")
        expected = len(self.z_alphabet) ** self.n
        if len(self.table) != expected:
            raise ValueError("attack table must cover every observation in Z^n")
        for z, guesses in self.table.items():
            if len(guesses) != self.lam or not all(0 <= l < self.L for l in guesses):
                raise ValueError(f"psi({z!r}) is not a set of {self.lam} secret indices")

    @classmethod
    def from_function(cls, lam, L, n, z_alphabet, fn: Callable) -> "AttackRegions":
        z_alphabet = tuple(z_alphabet)
        table = {z: frozenset(fn(z)) for z in product(z_alphabet, repeat=n)}
        return cls(lam, L, n, z_alphabet, table)

    def guesses(self, z) -> frozenset:
        key = z.symbols if isinstance(z, Sequence) else tuple(z)
        return self.table[key]

    def region(self, l: int) -> set:
        """Psi(l): observations whose list contains l."""
        return {z for z, g in self.table.items() if l in g}


def optimal_list_attack(cb: Codebook, W_e: Channel, lam: int, budget=None) -> AttackRegions:
    """For each z keep the lam secrets with largest sum_{m,j} W_e^n(z|x_jlm).

    Ties go to the smaller secret index.
    """
    if lam > cb.L or lam < 1:
        raise ValueError("list size must satisfy 1 <= lam <= L")
    if W_e.input_alphabet != cb.x_alphabet:
        raise ValueError("eavesdropper channel input alphabet differs from the code alphabet")
    nz = len(W_e.output_alphabet)
    _check_budget(nz**cb.n, budget, "attack table")
    per_pos = _position_tables(W_e)
    table = {}
    for z_idx in product(range(nz), repeat=cb.n):
        scores = []
        for l in range(cb.L):
            s = 0
            for m in range(cb.M):
                for x in cb.satellites[m][l]:
                    s += _seq_prob(per_pos, x.indices, z_idx)
            scores.append(s)
        order = sorted(range(cb.L), key=lambda l: (-scores[l], l))
        z = tuple(W_e.output_alphabet[i] for i in z_idx)
        table[z] = frozenset(order[:lam])
    return AttackRegions(lam, cb.L, cb.n, W_e.output_alphabet, table)


def _position_tables(W: Channel):
    return W.rows if W.exact else W.matrix.tolist()


def _seq_prob(rows, x_idx, y_idx):
    p = 1
    for a, b in zip(x_idx, y_idx):
        p *= rows[a][b]
        if not p:
            return p
    return p


@dataclass(frozen=True)
class FaultReport:
    e_b: object
    e_e: object
    s_e: object
    per_message: Mapping = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name in ("e_b", "e_e", "s_e"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name}={v} outside [0,1]")

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.e_b, self.e_e, self.s_e))


def _encoder_table(cb: Codebook, prefix: Optional[Channel], budget) -> dict:
    """f(x|m,l) as {(m,l): {x_idx: prob}} over the channel input alphabet."""
    table = {}
    if prefix is None:
        for m in range(cb.M):
            for l in range(cb.L):
                f = Counter(cb.satellites[m][l][j].indices for j in range(cb.J))
                table[(m, l)] = {x: Fraction(c, cb.J) for x, c in f.items()}
        return table
    on_pairs = prefix.input_alphabet == product_alphabet(cb.u_alphabet, cb.x_alphabet)
    if not on_pairs and prefix.input_alphabet != cb.x_alphabet:
        raise ValueError("prefix channel input must be the code alphabet or U x code alphabet")
    nout = len(prefix.output_alphabet)
    _check_budget(nout**cb.n, budget, "prefix channel input space")
    rows = _position_tables(prefix)
    nx = len(cb.x_alphabet)
    for m in range(cb.M):
        u = cb.cloud_centers[m].indices
        for l in range(cb.L):
            f = {}
            for j in range(cb.J):
                x = cb.satellites[m][l][j].indices
                src = tuple(a * nx + b for a, b in zip(u, x)) if on_pairs else x
                for out in product(range(nout), repeat=cb.n):
                    p = _seq_prob(rows, src, out)
                    if p:
                        f[out] = f.get(out, 0) + p / cb.J
            table[(m, l)] = f
    return table


def exact_fault_probabilities(cb: Codebook, W_b: Channel, W_e: Channel,
                              attack: AttackRegions, prefix: Optional[Channel] = None,
                              bob_decoder: Optional[Callable] = None,
                              eve_decoder: Optional[Callable] = None,
                              budget: Optional[int] = None) -> FaultReport:
    """Average fault probabilities by exhaustive summation over channel outputs.

    Decoders default to MMI. Custom decoders receive an output ``Sequence``
    and return ``(m, l)`` (Bob) or ``m`` (Eve), or ``None`` for no decision.
    With ``prefix`` the encoder output is first passed through that DMC.
    Results are exact ``Fraction`` values when all channels are exact.
    """
    chan_in = cb.x_alphabet if prefix is None else prefix.output_alphabet
    if W_b.input_alphabet != chan_in or W_e.input_alphabet != chan_in:
        raise ValueError("channel input alphabets do not match the transmitted symbols")
    if attack.L != cb.L or attack.n != cb.n or attack.z_alphabet != W_e.output_alphabet:
        raise ValueError("attack does not match the code and eavesdropper channel")
    ny, nz = len(W_b.output_alphabet), len(W_e.output_alphabet)
    _check_budget(max(ny, nz) ** cb.n, budget, "channel output space")

    dec = _Decoders(cb)
    ys = list(product(range(ny), repeat=cb.n))
    zs = list(product(range(nz), repeat=cb.n))
    if bob_decoder is None:
        bob = {y: dec.bob(y, ny) for y in ys}
    else:
        bob = {y: bob_decoder(Sequence.from_indices(y, W_b.output_alphabet)) for y in ys}
    if eve_decoder is None:
        eve = {z: dec.eve(z, nz) for z in zs}
    else:
        eve = {z: eve_decoder(Sequence.from_indices(z, W_e.output_alphabet)) for z in zs}
    lists = {z: attack.guesses(tuple(W_e.output_alphabet[i] for i in z)) for z in zs}

    exact = W_b.exact and W_e.exact and (prefix is None or prefix.exact)
    f = _encoder_table(cb, prefix, budget)
    wb, we = _position_tables(W_b), _position_tables(W_e)
    zero = Fraction(0) if exact else 0.0
    per, tot = {}, [zero, zero, zero]
    for (m, l), fx in f.items():
        eb = ee = se = zero
        for x, px in fx.items():
            if not exact:
                px = float(px)
            for y in ys:
                if bob[y] != (m, l):
                    eb += px * _seq_prob(wb, x, y)
            for z in zs:
                pz = _seq_prob(we, x, z)
                if not pz:
                    continue
                if eve[z] != m:
                    ee += px * pz
                if l in lists[z]:
                    se += px * pz
        per[(m, l)] = (eb, ee, se)
        tot = [tot[0] + eb, tot[1] + ee, tot[2] + se]
    k = cb.M * cb.L
    return FaultReport(tot[0] / k, tot[1] / k, tot[2] / k, per)


def monte_carlo_fault_probabilities(cb: Codebook, W_b: Channel, W_e: Channel, attack,
                                    samples: int, seed=None) -> dict:
    """Estimate (e_b, e_e, s_e) by simulation; returns estimates with standard errors.

    ``attack`` is an ``AttackRegions`` or a callable z -> set of guesses.
    """
    rng = np.random.default_rng(seed)
    dec = _Decoders(cb)
    guess = attack.guesses if isinstance(attack, AttackRegions) else attack
    wb, we = W_b.matrix, W_e.matrix
    ny, nz = wb.shape[1], we.shape[1]
    hits = np.zeros((samples, 3))
    for t in range(samples):
        m, l, j = rng.integers(cb.M), rng.integers(cb.L), rng.integers(cb.J)
        x = cb.satellites[m][l][j].indices
        y = tuple(int(rng.choice(ny, p=wb[a])) for a in x)
        z = tuple(int(rng.choice(nz, p=we[a])) for a in x)
        zs = Sequence.from_indices(z, W_e.output_alphabet)
        hits[t] = (dec.bob(y, ny) != (m, l), dec.eve(z, nz) != m, l in guess(zs))
    est = hits.mean(axis=0)
    se = hits.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros(3)
    return {"e_b": float(est[0]), "e_e": float(est[1]), "s_e": float(est[2]),
            "stderr": {"e_b": float(se[0]), "e_e": float(se[1]), "s_e": float(se[2])},
            "samples": samples}


def success_probability_guessing(prior: Distribution, posterior: Channel,
                                 marginal: Distribution, k: int) -> tuple:
    """Best k-guess success without and with the observation."""
    if posterior.output_alphabet != prior.alphabet or posterior.input_alphabet != marginal.alphabet:
        raise ValueError("posterior must map observations to the prior alphabet")
    if k < 1:
        raise ValueError("need at least one guess")
    apriori = sum(sorted(prior.probs, reverse=True)[:k])
    aposteriori = sum(pz * sum(sorted(row, reverse=True)[:k])
                      for pz, row in zip(marginal.probs, posterior.rows))
    return apriori, aposteriori


@dataclass(frozen=True)
class OverlapReport:
    """Overlap counts over independently sampled satellite sets."""

    J: int
    samples: int
    z: Sequence
    max_histogram: dict
    counts_at_z: tuple = field(repr=False)
    mean_at_z: float = 0.0
    stderr_at_z: float = 0.0
    expected_at_z: Fraction = Fraction(0)
    delta: float = 0.0
    threshold: float = 0.0
    tail_frequency: float = 0.0
    tail_bound: float = 0.0


def overlap_statistics(Q0: TypeVector, Q1: CondType, V: CondType, J: int, samples: int,
                       seed=None, z: Optional[Sequence] = None, delta: float = 0.1,
                       check_precondition: bool = True) -> OverlapReport:
    """Sample U uniform on T_Q0 and J satellites on T_Q1(U); count V-shells covering points.

    Reports the histogram of max_z sum_j 1{z in T_V(U o X_j)}, the count at a
    fixed ``z`` (default: first sequence of the Z-marginal type) and its exact
    expectation J * avg_u Pr{z in T_V(u o X)}. The doubly exponential tail
    bound is reported next to the empirical tail frequency, not asserted.
    """
    from .measures import cond_mutual_info

    n = Q0.n
    imi = cond_mutual_info(Q0.as_distribution(), Q1.as_channel(), V.as_channel())
    if check_precondition and J > math.floor(math.exp(n * imi) + 1e-9):
        raise ValueError(f"J={J} exceeds floor(exp(n I(Q1,V|Q0))) = "
                         f"{math.floor(math.exp(n * imi) + 1e-9)}")
    nx, nz = len(Q1.output_alphabet), len(V.output_alphabet)
    if z is None:
        z = next(enumerate_type_class(V.output_type()))
    rng = np.random.default_rng(seed)
    hist, at_z = Counter(), []
    for _ in range(samples):
        u_idx = _uniform_arrangement(Q0.counts, rng)
        cover = Counter()
        for _ in range(J):
            x_idx = _uniform_shell_member(u_idx, Q1.counts, rng)
            c_idx = tuple(a * nx + b for a, b in zip(u_idx, x_idx))
            cover.update(shell_indices(c_idx, V.counts, nz))
        hist[max(cover.values(), default=0)] += 1
        at_z.append(cover.get(z.indices, 0))
    members = list(enumerate_type_class(Q0))
    expected = J * sum(shell_membership_probability(Q0, Q1, V, u, z) for u in members) \
        / len(members)
    arr = np.array(at_z, dtype=float)
    threshold = math.exp(n * delta)
    return OverlapReport(
        J=J, samples=samples, z=z, max_histogram=dict(sorted(hist.items())),
        counts_at_z=tuple(at_z), mean_at_z=float(arr.mean()),
        stderr_at_z=float(arr.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
        expected_at_z=expected, delta=delta, threshold=threshold,
        tail_frequency=sum(c for k, c in hist.items() if k >= threshold) / samples,
        tail_bound=math.exp(-threshold))


def expected_packing_ratio(Q0: TypeVector, Q1: CondType, Q1hat: CondType,
                           V: CondType, Vhat: CondType) -> Fraction:
    """E |T_V(C) n T_Vhat(Chat)| / |T_V(C)| by exhaustive enumeration.

    U is uniform on T_Q0; X and Xhat are independent and uniform on the
    shells T_Q1(U) and T_Q1hat(U).
    """
    for q in (Q1, Q1hat):
        if q.input_alphabet != Q0.alphabet or q.row_totals != Q0.counts:
            raise ValueError("conditional types must be consistent with Q0")
    nx, nxh = len(Q1.output_alphabet), len(Q1hat.output_alphabet)
    if V.output_alphabet != Vhat.output_alphabet:
        raise ValueError("V and Vhat must share the output alphabet")
    ny = len(V.output_alphabet)
    size = shell_size(TypeVector(V.input_alphabet, [c for r in Q1.counts for c in r]), V)
    shell_size(TypeVector(Vhat.input_alphabet, [c for r in Q1hat.counts for c in r]), Vhat)
    vhat_counts = [list(r) for r in Vhat.counts]
    total = Fraction(0)
    us = [u.indices for u in enumerate_type_class(Q0)]
    for u in us:
        xs = list(shell_indices(u, Q1.counts, nx))
        xhs = list(shell_indices(u, Q1hat.counts, nxh))
        acc = 0
        for x in xs:
            c = tuple(a * nx + b for a, b in zip(u, x))
            ys = list(shell_indices(c, V.counts, ny))
            for xh in xhs:
                ch = tuple(a * nxh + b for a, b in zip(u, xh))
                acc += sum(1 for y in ys if _counts(ch, y, len(vhat_counts), ny) == vhat_counts)
        total += Fraction(acc, len(xs) * len(xhs) * size)
    return total / len(us)


def list_size_identity_check(regions: AttackRegions, S: Iterable) -> bool:
    """sum_l |Psi(l) n S| == lam |S|."""
    S = {s.symbols if isinstance(s, Sequence) else tuple(s) for s in S}
    lhs = sum(len(regions.region(l) & S) for l in range(regions.L))
    return lhs == regions.lam * len(S)
