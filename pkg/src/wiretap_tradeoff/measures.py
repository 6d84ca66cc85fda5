"""Finite-alphabet distributions, channels and information measures.

Every quantity is in nats. Probabilities may be given as exact
``Fraction`` values or as floats; a container whose entries are all
exact stays exact through ``marginal``, ``compose``, ``bayes`` and
``variation_distance``. The logarithmic measures always return floats.

Conventions: ``0 ln 0 = 0`` and ``0 ln(0/0) = 0``. ``divergence``
returns ``math.inf`` when absolute continuity fails on the support of
the input distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from numbers import Rational
from typing import Any, Sequence

import numpy as np

PROB_TOL = 1e-12


class AlphabetMismatch(ValueError):
    """Raised when two objects are combined over incompatible alphabets."""


def as_prob(value: Any):
    """Coerce a literal to an exact ``Fraction`` or a ``float``.

    Integers, fractions and strings (``"3/4"``, ``"0.25"``) become exact;
    floats stay floats.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise TypeError(f"cannot interpret {value!r} as a probability")


def _coerce_vector(values) -> tuple:
    vals = tuple(as_prob(v) for v in values)
    if any(isinstance(v, float) for v in vals):
        vals = tuple(float(v) for v in vals)
    return vals


def _is_exact(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _check_simplex(vals: tuple, what: str) -> None:
    if any(v < 0 for v in vals):
        raise ValueError(f"{what} has a negative entry")
    if any(isinstance(v, float) and not math.isfinite(v) for v in vals):
        raise ValueError(f"{what} has a non-finite entry")
    total = sum(vals)
    if _is_exact(vals):
        if total != 1:
            raise ValueError(f"{what} sums to {total}, not 1")
    elif abs(float(total) - 1.0) > PROB_TOL:
        raise ValueError(f"{what} sums to {float(total)!r}, not 1")


def _check_labels(alphabet: tuple, what: str) -> None:
    if len(alphabet) == 0:
        raise ValueError(f"{what} alphabet is empty")
    if len(set(alphabet)) != len(alphabet):
        raise ValueError(f"{what} alphabet has duplicate labels")


def product_alphabet(*alphabets: Sequence) -> tuple:
    """Row-major product of alphabets, labels are tuples."""
    return tuple(product(*alphabets))


@dataclass(frozen=True)
class Distribution:
    alphabet: tuple
    probs: tuple

    def __init__(self, alphabet, probs):
        alphabet = tuple(alphabet)
        probs = _coerce_vector(probs)
        _check_labels(alphabet, "distribution")
        if len(probs) != len(alphabet):
            raise ValueError("probability vector length differs from alphabet size")
        _check_simplex(probs, "distribution")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, alphabet) -> "Distribution":
        alphabet = tuple(alphabet)
        return cls(alphabet, [Fraction(1, len(alphabet))] * len(alphabet))

    @classmethod
    def point_mass(cls, alphabet, symbol) -> "Distribution":
        alphabet = tuple(alphabet)
        return cls(alphabet, [Fraction(int(a == symbol)) for a in alphabet])

    @property
    def exact(self) -> bool:
        return _is_exact(self.probs)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def __getitem__(self, symbol):
        return self.probs[self.alphabet.index(symbol)]

    def __len__(self) -> int:
        return len(self.alphabet)


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix; ``rows[i]`` is the law of the output given input ``i``."""

    input_alphabet: tuple
    output_alphabet: tuple
    rows: tuple

    def __init__(self, input_alphabet, output_alphabet, rows):
        input_alphabet = tuple(input_alphabet)
        output_alphabet = tuple(output_alphabet)
        _check_labels(input_alphabet, "channel input")
        _check_labels(output_alphabet, "channel output")
        rows = [tuple(as_prob(v) for v in row) for row in rows]
        if len(rows) != len(input_alphabet):
            raise ValueError("number of rows differs from input alphabet size")
        if any(isinstance(v, float) for row in rows for v in row):
            rows = [tuple(float(v) for v in row) for row in rows]
        for x, row in zip(input_alphabet, rows):
            if len(row) != len(output_alphabet):
                raise ValueError(f"row {x!r} has wrong length")
            _check_simplex(row, f"channel row {x!r}")
        object.__setattr__(self, "input_alphabet", input_alphabet)
        object.__setattr__(self, "output_alphabet", output_alphabet)
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_matrix(cls, input_alphabet, output_alphabet, matrix) -> "Channel":
        return cls(input_alphabet, output_alphabet, [list(r) for r in np.asarray(matrix)])

    @classmethod
    def identity(cls, alphabet) -> "Channel":
        alphabet = tuple(alphabet)
        return cls(alphabet, alphabet,
                   [[Fraction(int(a == b)) for b in alphabet] for a in alphabet])

    @property
    def exact(self) -> bool:
        return all(_is_exact(r) for r in self.rows)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.rows]).reshape(
            len(self.input_alphabet), len(self.output_alphabet))

    def row(self, x) -> Distribution:
        return Distribution(self.output_alphabet, self.rows[self.input_alphabet.index(x)])

    def prob(self, y, x):
        return self.rows[self.input_alphabet.index(x)][self.output_alphabet.index(y)]

    def extend(self, prefix_alphabet) -> "Channel":
        """Channel on ``prefix_alphabet x input`` that ignores the prefix symbol."""
        inputs = product_alphabet(prefix_alphabet, self.input_alphabet)
        rows = [self.rows[self.input_alphabet.index(x)] for _, x in inputs]
        return Channel(inputs, self.output_alphabet, rows)


@dataclass(frozen=True)
class JointDistribution:
    """Probability tensor over a product of factor alphabets (float valued)."""

    alphabets: tuple
    tensor: np.ndarray

    def __init__(self, alphabets, tensor):
        alphabets = tuple(tuple(a) for a in alphabets)
        tensor = np.asarray(tensor, dtype=float)
        if tensor.shape != tuple(len(a) for a in alphabets):
            raise ValueError("tensor shape does not match factor alphabets")
        if np.any(tensor < 0) or abs(tensor.sum() - 1.0) > PROB_TOL:
            raise ValueError("joint tensor must be non-negative with unit sum")
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "tensor", tensor)

    def marginal(self, axes) -> np.ndarray:
        axes = tuple(axes)
        drop = tuple(i for i in range(self.tensor.ndim) if i not in axes)
        m = self.tensor.sum(axis=drop)
        # sum keeps remaining axes in increasing order
        order = sorted(axes)
        return np.transpose(m, [order.index(a) for a in axes])

    def entropy(self, axes=None) -> float:
        p = self.tensor if axes is None else self.marginal(axes)
        return _plogp_sum(np.ravel(p))


def _plogp_sum(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])))


def _same(a: tuple, b: tuple, what: str) -> None:
    if tuple(a) != tuple(b):
        raise AlphabetMismatch(f"{what}: {a!r} != {b!r}")


def entropy(p: Distribution) -> float:
    return _plogp_sum(p.array)


def cond_entropy(Q: Distribution, V: Channel) -> float:
    """H(V|Q) = sum Q(x) V(y|x) ln 1/V(y|x)."""
    _same(Q.alphabet, V.input_alphabet, "cond_entropy")
    return float(sum(q * _plogp_sum(row) for q, row in zip(Q.array, V.matrix) if q > 0))


def divergence(V: Channel, W: Channel, Q: Distribution) -> float:
    """Conditional divergence D(V||W|Q); ``math.inf`` if V is not dominated by W on supp Q."""
    _same(V.input_alphabet, W.input_alphabet, "divergence inputs")
    _same(V.output_alphabet, W.output_alphabet, "divergence outputs")
    _same(Q.alphabet, V.input_alphabet, "divergence conditioning")
    total = 0.0
    for q, v, w in zip(Q.array, V.matrix, W.matrix):
        if q <= 0:
            continue
        nz = v > 0
        if np.any(w[nz] <= 0):
            return math.inf
        total += q * float(np.sum(v[nz] * (np.log(v[nz]) - np.log(w[nz]))))
    return max(total, 0.0)


def marginal(Q: Distribution, V: Channel) -> Distribution:
    """Output law QV."""
    _same(Q.alphabet, V.input_alphabet, "marginal")
    if Q.exact and V.exact:
        probs = [sum(q * row[k] for q, row in zip(Q.probs, V.rows))
                 for k in range(len(V.output_alphabet))]
        return Distribution(V.output_alphabet, probs)
    probs = Q.array @ V.matrix
    return Distribution(V.output_alphabet, probs / probs.sum())


def mutual_info(Q: Distribution, V: Channel) -> float:
    """I(Q,V) = H(QV) - H(V|Q), clipped at 0 against rounding."""
    _same(Q.alphabet, V.input_alphabet, "mutual_info")
    return max(_plogp_sum(Q.array @ V.matrix) - cond_entropy(Q, V), 0.0)


def joint(Q: Distribution, V: Channel) -> JointDistribution:
    _same(Q.alphabet, V.input_alphabet, "joint")
    return JointDistribution([Q.alphabet, V.output_alphabet], Q.array[:, None] * V.matrix)


def direct_product(Q0: Distribution, Q1: Channel) -> Distribution:
    """Q0 o Q1 as a distribution over the product alphabet."""
    _same(Q0.alphabet, Q1.input_alphabet, "direct_product")
    probs = [q * v for q, row in zip(Q0.probs, Q1.rows) for v in row]
    return Distribution(product_alphabet(Q0.alphabet, Q1.output_alphabet), probs)


def cascade(Q1: Channel, V: Channel) -> Channel:
    """Channel u -> z given by sum_x Q1(x|u) V(z|u,x), with V defined on U x X."""
    _same(V.input_alphabet, product_alphabet(Q1.input_alphabet, Q1.output_alphabet),
          "cascade")
    nx = len(Q1.output_alphabet)
    vm = V.matrix.reshape(len(Q1.input_alphabet), nx, -1)
    m = np.einsum("ux,uxz->uz", Q1.matrix, vm)
    m /= m.sum(axis=1, keepdims=True)
    return Channel.from_matrix(Q1.input_alphabet, V.output_alphabet, m)


def cond_mutual_info(Q0: Distribution, Q1: Channel, V: Channel) -> float:
    """I(Q1,V|Q0) = I(X ^ Z | U) for (U,X,Z) ~ Q0 o Q1 o V.

    Evaluated as H(Q1V|Q0) - H(V|Q0 o Q1).
    """
    _same(Q0.alphabet, Q1.input_alphabet, "cond_mutual_info")
    Q = direct_product(Q0, Q1)
    _same(Q.alphabet, V.input_alphabet, "cond_mutual_info")
    return max(cond_entropy(Q0, cascade(Q1, V)) - cond_entropy(Q, V), 0.0)


def bayes(prior: Distribution, forward: Channel) -> tuple[Channel, Distribution]:
    """Posterior channel (indexed by outputs) and output marginal.

    Rows of zero-probability outputs are uniform over the prior alphabet.
    """
    _same(prior.alphabet, forward.input_alphabet, "bayes")
    out = marginal(prior, forward)
    k = len(prior.alphabet)
    rows = []
    for j, py in enumerate(out.probs):
        if py == 0:
            rows.append([Fraction(1, k)] * k if out.exact else [1.0 / k] * k)
            continue
        row = [p * frow[j] / py for p, frow in zip(prior.probs, forward.rows)]
        if not out.exact:
            s = sum(row)
            row = [r / s for r in row]
        rows.append(row)
    return Channel(forward.output_alphabet, prior.alphabet, rows), out


def variation_distance(P: Distribution, Q: Distribution):
    """max_A P(A) - Q(A), i.e. half the L1 distance."""
    _same(P.alphabet, Q.alphabet, "variation_distance")
    if P.exact and Q.exact:
        return sum(abs(p - q) for p, q in zip(P.probs, Q.probs)) / 2
    return float(np.abs(P.array - Q.array).sum() / 2)


def compose(prefix: Channel, w: Channel) -> Channel:
    """Matrix product: feed the output of ``prefix`` into ``w``."""
    _same(prefix.output_alphabet, w.input_alphabet, "compose")
    if prefix.exact and w.exact:
        rows = [[sum(a * w.rows[i][k] for i, a in enumerate(row))
                 for k in range(len(w.output_alphabet))] for row in prefix.rows]
        return Channel(prefix.input_alphabet, w.output_alphabet, rows)
    m = prefix.matrix @ w.matrix
    m /= m.sum(axis=1, keepdims=True)
    return Channel.from_matrix(prefix.input_alphabet, w.output_alphabet, m)
