"""Method of types: exact types, canonical conditional types, classes and shells.

All cardinalities are Python integers and all probabilities derived from
them are ``Fraction`` values. Enumerations follow lexicographic order of
symbol positions in the declared alphabets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterator

from .measures import Channel, Distribution, mutual_info, product_alphabet


@dataclass(frozen=True)
class Sequence:
    symbols: tuple
    alphabet: tuple

    def __init__(self, symbols, alphabet):
        symbols = tuple(symbols)
        alphabet = tuple(alphabet)
        if len(symbols) < 1:
            raise ValueError("sequences must have length n >= 1")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet has duplicate labels")
        lookup = set(alphabet)
        for s in symbols:
            if s not in lookup:
                raise ValueError(f"symbol {s!r} not in alphabet")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "alphabet", alphabet)

    @classmethod
    def from_indices(cls, indices, alphabet) -> "Sequence":
        alphabet = tuple(alphabet)
        return cls([alphabet[i] for i in indices], alphabet)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @cached_property
    def indices(self) -> tuple:
        pos = {a: i for i, a in enumerate(self.alphabet)}
        return tuple(pos[s] for s in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)


def concat(u: Sequence, x: Sequence) -> Sequence:
    """Element-wise concatenation u o x over the product alphabet."""
    if u.n != x.n:
        raise ValueError("sequences differ in length")
    return Sequence(list(zip(u.symbols, x.symbols)), product_alphabet(u.alphabet, x.alphabet))


@dataclass(frozen=True)
class TypeVector:
    alphabet: tuple
    counts: tuple

    def __init__(self, alphabet, counts):
        alphabet = tuple(alphabet)
        counts = tuple(int(c) for c in counts)
        if len(alphabet) != len(counts):
            raise ValueError("counts length differs from alphabet size")
        if any(c < 0 for c in counts):
            raise ValueError("negative count")
        if sum(counts) < 1:
            raise ValueError("type of an empty sequence")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def as_distribution(self) -> Distribution:
        return Distribution(self.alphabet, [Fraction(c, self.n) for c in self.counts])


@dataclass(frozen=True)
class CondType:
    """Joint counts N(x,y); zero-count input rows are read as uniform (canonical)."""

    input_alphabet: tuple
    output_alphabet: tuple
    counts: tuple

    def __init__(self, input_alphabet, output_alphabet, counts):
        input_alphabet = tuple(input_alphabet)
        output_alphabet = tuple(output_alphabet)
        counts = tuple(tuple(int(c) for c in row) for row in counts)
        if len(counts) != len(input_alphabet):
            raise ValueError("need one count row per input symbol")
        if any(len(r) != len(output_alphabet) for r in counts):
            raise ValueError("count row length differs from output alphabet size")
        if any(c < 0 for r in counts for c in r):
            raise ValueError("negative count")
        object.__setattr__(self, "input_alphabet", input_alphabet)
        object.__setattr__(self, "output_alphabet", output_alphabet)
        object.__setattr__(self, "counts", counts)

    @property
    def row_totals(self) -> tuple:
        return tuple(sum(r) for r in self.counts)

    @property
    def n(self) -> int:
        return sum(self.row_totals)

    def input_type(self) -> TypeVector:
        return TypeVector(self.input_alphabet, self.row_totals)

    def canonical_rows(self) -> tuple:
        """Input symbols whose row is the canonical uniform filler."""
        return tuple(x for x, t in zip(self.input_alphabet, self.row_totals) if t == 0)

    def as_channel(self) -> Channel:
        k = len(self.output_alphabet)
        rows = [[Fraction(c, t) for c in r] if t else [Fraction(1, k)] * k
                for r, t in zip(self.counts, self.row_totals)]
        return Channel(self.input_alphabet, self.output_alphabet, rows)

    def output_type(self) -> TypeVector:
        return TypeVector(self.output_alphabet,
                          [sum(r[j] for r in self.counts) for j in range(len(self.output_alphabet))])


def empirical_type(s: Sequence) -> TypeVector:
    counts = [0] * len(s.alphabet)
    for i in s.indices:
        counts[i] += 1
    return TypeVector(s.alphabet, counts)


def _pair_counts(x: Sequence, y: Sequence) -> list:
    if x.n != y.n:
        raise ValueError("sequences differ in length")
    counts = [[0] * len(y.alphabet) for _ in x.alphabet]
    for i, j in zip(x.indices, y.indices):
        counts[i][j] += 1
    return counts


def canonical_cond_type(x: Sequence, y: Sequence) -> CondType:
    return CondType(x.alphabet, y.alphabet, _pair_counts(x, y))


def compositions(n: int, k: int) -> Iterator[tuple]:
    """All k-part compositions of n, first part descending: (n,0,..), ..., (0,..,n)."""
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_types(n: int, alphabet) -> list[TypeVector]:
    if n < 1:
        raise ValueError("n must be positive")
    alphabet = tuple(alphabet)
    return [TypeVector(alphabet, c) for c in compositions(n, len(alphabet))]


def enumerate_cond_types(Q: TypeVector, out_alphabet) -> list[CondType]:
    out_alphabet = tuple(out_alphabet)
    k = len(out_alphabet)
    per_row = [list(compositions(c, k)) if c else [(0,) * k] for c in Q.counts]
    return [CondType(Q.alphabet, out_alphabet, rows) for rows in product(*per_row)]


def multinomial(counts) -> int:
    total, out = 0, 1
    for c in counts:
        total += c
        out *= math.comb(total, c)
    return out


def type_class_size(Q: TypeVector) -> int:
    return multinomial(Q.counts)


def _check_shell(Q_counts: tuple, V: CondType) -> None:
    if tuple(Q_counts) != V.row_totals:
        raise ValueError("conditional type rows are inconsistent with the input type counts")


def shell_size(Q: TypeVector, V: CondType) -> int:
    """|T_V(x)| for any x of type Q."""
    if Q.alphabet != V.input_alphabet:
        raise ValueError("alphabet mismatch between type and conditional type")
    _check_shell(Q.counts, V)
    return math.prod(multinomial(r) for r in V.counts)


def _fill(groups: list, remaining: list, nsym: int) -> Iterator[tuple]:
    # groups[i]: which multiset position i draws from; remaining[g]: counts left in group g
    n = len(groups)
    out = [0] * n

    def rec(i):
        if i == n:
            yield tuple(out)
            return
        g = groups[i]
        row = remaining[g]
        for s in range(nsym):
            if row[s]:
                row[s] -= 1
                out[i] = s
                yield from rec(i + 1)
                row[s] += 1

    yield from rec(0)


def enumerate_type_class(Q: TypeVector) -> Iterator[Sequence]:
    for idx in _fill([0] * Q.n, [list(Q.counts)], len(Q.alphabet)):
        yield Sequence.from_indices(idx, Q.alphabet)


def shell_indices(x_indices: tuple, counts: tuple, nout: int) -> Iterator[tuple]:
    """Index tuples of the V-shell of x (x given by indices, V by joint counts)."""
    return _fill(list(x_indices), [list(r) for r in counts], nout)


def enumerate_shell(x: Sequence, V: CondType) -> Iterator[Sequence]:
    if x.alphabet != V.input_alphabet:
        raise ValueError("alphabet mismatch between sequence and conditional type")
    _check_shell(empirical_type(x).counts, V)
    for idx in shell_indices(x.indices, V.counts, len(V.output_alphabet)):
        yield Sequence.from_indices(idx, V.output_alphabet)


def empirical_mutual_info(x: Sequence, y: Sequence) -> float:
    """I(x ^ y) = I(P_x, P_{y|x})."""
    return mutual_info(empirical_type(x).as_distribution(), canonical_cond_type(x, y).as_channel())


def sequence_probability(W: Channel, x: Sequence, y: Sequence):
    """W^n(y|x); exact when W is exact."""
    if x.n != y.n:
        raise ValueError("sequences differ in length")
    p = Fraction(1) if W.exact else 1.0
    for a, b in zip(x.symbols, y.symbols):
        p *= W.prob(b, a)
    return p


def shell_membership_probability(Q0: TypeVector, Q1: CondType, V: CondType,
                                 u: Sequence, z: Sequence) -> Fraction:
    """Pr{z in T_V(u o X)} for X uniform on T_{Q1}(u), as an exact rational.

    Q1 is a conditional type U -> X with row totals equal to Q0's counts;
    V is a conditional type (U x X) -> Z with row totals equal to the joint
    counts of Q0 o Q1.
    """
    U, X, Z = Q0.alphabet, Q1.output_alphabet, V.output_alphabet
    if Q1.input_alphabet != U or V.input_alphabet != product_alphabet(U, X):
        raise ValueError("inconsistent alphabets for U, X, Z")
    if u.alphabet != U or z.alphabet != Z:
        raise ValueError("sequence alphabets do not match the types")
    _check_shell(Q0.counts, Q1)
    joint_ux = tuple(c for row in Q1.counts for c in row)
    _check_shell(joint_ux, V)
    if empirical_type(u).counts != Q0.counts:
        raise ValueError("u is not in the type class of Q0")
    nx = len(X)
    # N(u,x,z) as prescribed by Q0 o Q1 o V
    nuxz = [[[V.counts[a * nx + b][c] for c in range(len(Z))] for b in range(nx)]
            for a in range(len(U))]
    observed_uz = _pair_counts(u, z)
    for a in range(len(U)):
        for c in range(len(Z)):
            if observed_uz[a][c] != sum(nuxz[a][b][c] for b in range(nx)):
                return Fraction(0)
    num = math.prod(multinomial([nuxz[a][b][c] for b in range(nx)])
                    for a in range(len(U)) for c in range(len(Z)))
    den = math.prod(multinomial(r) for r in Q1.counts)
    return Fraction(num, den)


def binomial_exponent_bound_check(R: float, delta: float, n: int) -> bool:
    """Check C(a, b) <= exp{(log e + n(R - delta)) b} with a = [e^{nR}], b = [e^{n delta}]."""
    a = round(math.exp(n * R))
    b = round(math.exp(n * delta))
    if not a >= b >= 1:
        raise ValueError("need exp(nR) >= exp(n delta) >= 1 after rounding")
    lhs = math.comb(a, b)
    return math.log(lhs) <= (1.0 + n * (R - delta)) * b + 1e-12
