import math
from decimal import Decimal, getcontext
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretap_tradeoff.measures import (
    AlphabetMismatch,
    Channel,
    Distribution,
    JointDistribution,
    bayes,
    cascade,
    compose,
    cond_entropy,
    cond_mutual_info,
    direct_product,
    divergence,
    entropy,
    joint,
    marginal,
    mutual_info,
    variation_distance,
)


def rand_dist(rng, k, labels=None):
    return Distribution(labels or tuple(range(k)), rng.dirichlet(np.ones(k)))


def rand_channel(rng, nin, nout, inp=None, out=None):
    return Channel.from_matrix(inp or tuple(range(nin)), out or tuple(range(nout)),
                               rng.dirichlet(np.ones(nout), size=nin))


def h2(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


# construction --------------------------------------------------------------

def test_distribution_rejects_bad_sum():
    with pytest.raises(ValueError):
        Distribution((0, 1), [0.5, 0.6])


def test_distribution_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        Distribution((0, 0), [0.5, 0.5])


def test_exact_probabilities_parse_from_strings():
    P = Distribution(("a", "b"), ["1/3", "2/3"])
    assert P.exact and P["b"] == F(2, 3)


def test_channel_rows_checked():
    with pytest.raises(ValueError):
        Channel((0, 1), (0, 1), [[1, 0], [F(1, 2), F(1, 3)]])


def test_joint_distribution_marginal_order():
    t = np.arange(6, dtype=float).reshape(2, 3) / 15
    J = JointDistribution(((0, 1), (0, 1, 2)), t)
    assert np.allclose(J.marginal((1, 0)), t.T)


# entropy --------------------------------------------------------------------

def test_entropy_uniform_binary():
    assert entropy(Distribution.uniform((0, 1))) == pytest.approx(math.log(2), abs=1e-15)


def test_entropy_point_mass():
    assert entropy(Distribution.point_mass((0, 1, 2), 1)) == 0.0


def test_entropy_three_quarters_high_precision():
    getcontext().prec = 50
    a, b = Decimal(3) / 4, Decimal(1) / 4
    oracle = -(a * a.ln() + b * b.ln())
    assert entropy(Distribution((0, 1), ["3/4", "1/4"])) == pytest.approx(float(oracle), abs=1e-15)


def test_cond_entropy_deterministic_is_zero():
    V = Channel((0, 1), (0, 1), [[0, 1], [1, 0]])
    assert cond_entropy(Distribution.uniform((0, 1)), V) == 0.0


def test_cond_entropy_point_mass_reduces_to_row_entropy():
    rng = np.random.default_rng(1)
    V = rand_channel(rng, 3, 4)
    assert cond_entropy(Distribution.point_mass((0, 1, 2), 2), V) == pytest.approx(entropy(V.row(2)))


def test_cond_entropy_bsc():
    V = Channel((0, 1), (0, 1), [["3/4", "1/4"], ["1/4", "3/4"]])
    brute = sum(0.5 * v * math.log(1 / v) for row in V.matrix for v in row)
    assert cond_entropy(Distribution.uniform((0, 1)), V) == pytest.approx(brute, abs=1e-15)
    assert brute == pytest.approx(h2(0.25), abs=1e-15)


def test_alphabet_mismatch_raises():
    with pytest.raises(AlphabetMismatch):
        cond_entropy(Distribution.uniform((0, 1, 2)), Channel.identity((0, 1)))


# divergence -----------------------------------------------------------------

def test_divergence_self_is_zero():
    rng = np.random.default_rng(2)
    V = rand_channel(rng, 2, 3)
    assert divergence(V, V, rand_dist(rng, 2)) == 0.0


def test_divergence_infinite_on_support_failure():
    V = Channel((0, 1), (0, 1), [["1/2", "1/2"], [1, 0]])
    W = Channel((0, 1), (0, 1), [[1, 0], [1, 0]])
    assert divergence(V, W, Distribution.uniform((0, 1))) == math.inf
    # the offending row carries no mass
    assert divergence(V, W, Distribution.point_mass((0, 1), 1)) == 0.0


def test_divergence_matches_term_summation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        V, W, Q = rand_channel(rng, 2, 2), rand_channel(rng, 2, 2), rand_dist(rng, 2)
        oracle = sum(Q.array[x] * V.matrix[x, y] * math.log(V.matrix[x, y] / W.matrix[x, y])
                     for x in range(2) for y in range(2))
        assert divergence(V, W, Q) == pytest.approx(oracle, abs=1e-12)


def test_zero_log_zero_convention():
    V = Channel((0, 1), (0, 1), [[1, 0], [0, 1]])
    W = Channel((0, 1), (0, 1), [["1/2", "1/2"], ["1/2", "1/2"]])
    assert divergence(V, W, Distribution.uniform((0, 1))) == pytest.approx(math.log(2))


# mutual information ---------------------------------------------------------

def test_mutual_info_identical_rows():
    V = Channel((0, 1, 2), (0, 1), [["1/3", "2/3"]] * 3)
    assert mutual_info(Distribution.uniform((0, 1, 2)), V) == 0.0


@pytest.mark.parametrize("k", [2, 3, 5])
def test_mutual_info_identity(k):
    A = tuple(range(k))
    assert mutual_info(Distribution.uniform(A), Channel.identity(A)) == pytest.approx(math.log(k))


def test_mutual_info_equals_divergence_from_product():
    rng = np.random.default_rng(4)
    Q, V = rand_dist(rng, 3), rand_channel(rng, 3, 2)
    P = Q.array[:, None] * V.matrix
    prod = Q.array[:, None] * P.sum(axis=0)[None, :]
    oracle = float(np.sum(P * np.log(P / prod)))
    assert mutual_info(Q, V) == pytest.approx(oracle, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_mutual_info_bounds_and_chain(seed, nin, nout):
    rng = np.random.default_rng(seed)
    Q, V = rand_dist(rng, nin), rand_channel(rng, nin, nout)
    i = mutual_info(Q, V)
    assert -1e-15 <= i <= min(math.log(nin), math.log(nout)) + 1e-12
    assert entropy(marginal(Q, V)) - cond_entropy(Q, V) == pytest.approx(i, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_data_processing(seed):
    rng = np.random.default_rng(seed)
    Q, V, W = rand_dist(rng, 3), rand_channel(rng, 3, 3), rand_channel(rng, 3, 2)
    assert mutual_info(Q, compose(V, W)) <= mutual_info(Q, V) + 1e-12


# conditional mutual information ------------------------------------------------

def _aux(rng, nu, nx, nz):
    U, X = tuple(range(nu)), tuple(range(nx))
    Q0 = rand_dist(rng, nu)
    Q1 = rand_channel(rng, nu, nx, U, X)
    V = rand_channel(rng, nu * nx, nz, tuple((u, x) for u in U for x in X))
    return Q0, Q1, V


def test_cond_mutual_info_zero_when_v_ignores_x():
    rng = np.random.default_rng(5)
    Q0, Q1, _ = _aux(rng, 2, 3, 2)
    rows = rng.dirichlet(np.ones(2), size=2)
    V = Channel.from_matrix(direct_product(Q0, Q1).alphabet, (0, 1),
                            [rows[u] for u in range(2) for _ in range(3)])
    assert cond_mutual_info(Q0, Q1, V) == pytest.approx(0.0, abs=1e-15)


def test_cond_mutual_info_trivial_u():
    rng = np.random.default_rng(6)
    Q0 = Distribution(("*",), [1])
    row = rng.dirichlet(np.ones(3))
    Q1 = Channel.from_matrix(("*",), (0, 1, 2), [row])
    W = rand_channel(rng, 3, 2)
    assert cond_mutual_info(Q0, Q1, W.extend(("*",))) == pytest.approx(
        mutual_info(Distribution((0, 1, 2), row), W), abs=1e-13)


def test_cond_mutual_info_per_symbol_decomposition():
    rng = np.random.default_rng(7)
    Q0, Q1, V = _aux(rng, 2, 2, 2)
    oracle = 0.0
    for u in range(2):
        rows = Channel.from_matrix((0, 1), (0, 1), V.matrix[2 * u:2 * u + 2])
        oracle += Q0.array[u] * mutual_info(Q1.row(u), rows)
    assert cond_mutual_info(Q0, Q1, V) == pytest.approx(oracle, abs=1e-12)


def test_cascade_is_u_to_z_channel():
    rng = np.random.default_rng(8)
    Q0, Q1, V = _aux(rng, 2, 3, 2)
    C = cascade(Q1, V)
    for u in range(2):
        expect = sum(Q1.matrix[u, x] * V.matrix[3 * u + x] for x in range(3))
        assert np.allclose(C.matrix[u], expect)


# marginal / bayes / variation / compose ----------------------------------------

def test_marginal_identity_and_constant_rows():
    rng = np.random.default_rng(9)
    Q = rand_dist(rng, 3)
    assert np.allclose(marginal(Q, Channel.identity((0, 1, 2))).array, Q.array)
    const = Channel((0, 1, 2), ("a", "b"), [["1/5", "4/5"]] * 3)
    assert np.allclose(marginal(Q, const).array, [0.2, 0.8])


def test_marginal_column_sums():
    rng = np.random.default_rng(10)
    Q, V = rand_dist(rng, 4), rand_channel(rng, 4, 3)
    assert np.allclose(marginal(Q, V).array, (Q.array[:, None] * V.matrix).sum(axis=0), atol=1e-15)


def test_bayes_identity_forward():
    Q = Distribution((0, 1), ["1/3", "2/3"])
    post, out = bayes(Q, Channel.identity((0, 1)))
    assert post.rows == ((1, 0), (0, 1)) and out.probs == Q.probs


def test_bayes_inverts_posterior_example():
    # S ~ [3/4, 1/4]; Z | S chosen so that P_Z = [5/8, 3/8], P_{S|Z} = [[4/5,1/5],[2/3,1/3]]
    prior = Distribution(("s0", "s1"), ["3/4", "1/4"])
    fwd = Channel(("s0", "s1"), ("z0", "z1"), [["2/3", "1/3"], ["1/2", "1/2"]])
    post, out = bayes(prior, fwd)
    assert out.probs == (F(5, 8), F(3, 8))
    assert post.rows == ((F(4, 5), F(1, 5)), (F(2, 3), F(1, 3)))


def test_bayes_zero_output_row_uniform():
    prior = Distribution((0, 1), ["1/2", "1/2"])
    fwd = Channel((0, 1), ("a", "b", "c"), [[1, 0, 0], [0, 1, 0]])
    post, out = bayes(prior, fwd)
    assert out["c"] == 0 and post.rows[2] == (F(1, 2), F(1, 2))


def test_bayes_joint_reconstruction():
    rng = np.random.default_rng(11)
    prior, fwd = rand_dist(rng, 3), rand_channel(rng, 3, 3)
    post, out = bayes(prior, fwd)
    J1 = prior.array[:, None] * fwd.matrix
    J2 = (out.array[:, None] * post.matrix).T
    assert np.allclose(J1, J2, atol=1e-12)


def test_variation_distance_cases():
    P = Distribution((0, 1, 2), ["1/2", "1/2", 0])
    Q = Distribution((0, 1, 2), [0, 0, 1])
    assert variation_distance(P, P) == 0
    assert variation_distance(P, Q) == 1
    rng = np.random.default_rng(12)
    A, B, C = (rand_dist(rng, 4) for _ in range(3))
    assert variation_distance(A, B) == pytest.approx(0.5 * np.abs(A.array - B.array).sum())
    assert variation_distance(A, C) <= variation_distance(A, B) + variation_distance(B, C) + 1e-15


def test_compose_identity_prefix():
    rng = np.random.default_rng(13)
    W = rand_channel(rng, 3, 2)
    assert np.allclose(compose(Channel.identity((0, 1, 2)), W).matrix, W.matrix)


def test_compose_prefix_example():
    X = ("00", "01", "10", "11")
    Vt = Channel((0, 1), X, [["1/3", "2/3", 0, 0], [0, 0, "2/3", "1/3"]])
    W_b = Channel(X, (0, 1), [[1, 0], [1, 0], [0, 1], [0, 1]])
    W_e = Channel(X, (0, 1, 2), [[1, 0, 0], [0, "1/2", "1/2"], ["1/2", "1/2", 0], [0, 0, 1]])
    assert compose(Vt, W_e).rows == ((F(1, 3),) * 3,) * 2
    assert compose(Vt, W_b).rows == ((1, 0), (0, 1))


def test_compose_associative():
    rng = np.random.default_rng(14)
    A, B, C = rand_channel(rng, 2, 3), rand_channel(rng, 3, 4), rand_channel(rng, 4, 2)
    assert np.allclose(compose(compose(A, B), C).matrix, compose(A, compose(B, C)).matrix, atol=1e-12)


def test_joint_and_direct_product():
    Q0 = Distribution(("a", "b"), ["1/4", "3/4"])
    Q1 = Channel(("a", "b"), (0, 1), [["1/2", "1/2"], [1, 0]])
    Q = direct_product(Q0, Q1)
    assert Q.alphabet == (("a", 0), ("a", 1), ("b", 0), ("b", 1))
    assert Q.probs == (F(1, 8), F(1, 8), F(3, 4), 0)
    J = joint(Q0, Q1)
    assert np.allclose(J.tensor, [[1 / 8, 1 / 8], [3 / 4, 0]])
