import math

import numpy as np
import pytest
from helpers import rand_aux, rand_channel

from wiretap_tradeoff import examples as ex
from wiretap_tradeoff.exponents import AuxSpec
from wiretap_tradeoff.measures import Channel, Distribution, mutual_info
from wiretap_tradeoff.polytope import (
    Polytope,
    membership_many,
    project,
    remove_redundant,
    vertex_enumeration,
)
from wiretap_tradeoff.region import (
    FAMILIES,
    MIQuantities,
    admissible_bounds,
    alt_constraints,
    classify,
    closed_reading,
    family_of,
    gnuplot_data,
    hull_containment_check,
    irredundant_families,
    mi_quantities,
    mi_quantities_joint,
    mixed_quantities,
    mixing_alpha,
    mixing_aux,
    rate_region,
    raw_constraints,
    reduced_constraints,
)


def random_q(rng):
    return MIQuantities.from_parts(*rng.uniform(0, 1, 4))


def box_points(rng, q, n=1000):
    return rng.uniform(-0.05, 1.2 * max(q.largest, 0.1), size=(n, 3))


# quantities ---------------------------------------------------------------------------

def test_chain_rule_enforced():
    with pytest.raises(ValueError):
        MIQuantities(0.1, 0.5, 0.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        MIQuantities.from_parts(-0.1, 0.1, 0.0, 0.0)


def test_trivial_u_identity_prefix():
    W_b = Channel.from_matrix((0, 1), (0, 1), [[0.9, 0.1], [0.2, 0.8]])
    W_e = Channel.from_matrix((0, 1), (0, 1), [[0.6, 0.4], [0.4, 0.6]])
    P = Distribution((0, 1), [0.4, 0.6])
    q = mi_quantities(W_b, W_e, AuxSpec.trivial((0, 1), P))
    assert q.i_u_y == 0 and q.i_u_z == 0
    assert q.i_xt_y_given_u == pytest.approx(mutual_info(P, W_b), abs=1e-15)


def test_prefix_example_quantities():
    Vt, W_b, W_e = ex.prefix_channels()
    Q0 = Distribution(("*",), [1])
    Q1 = Channel(("*",), (0, 1), [["1/2", "1/2"]])
    q = mi_quantities(W_b, W_e, AuxSpec(Q0, Q1, Vt.extend(("*",))))
    assert q.i_xt_z_given_u < 1e-12
    assert q.i_xt_y_given_u == pytest.approx(math.log(2), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_two_evaluation_paths_agree(seed):
    rng = np.random.default_rng(seed)
    aux = rand_aux(rng, 3, 2, 3)
    W_b = rand_channel(rng, 3, 2, aux.x_alphabet)
    W_e = rand_channel(rng, 3, 3, aux.x_alphabet)
    a, b = mi_quantities(W_b, W_e, aux), mi_quantities_joint(W_b, W_e, aux)
    for k, v in a.as_dict().items():
        assert v == pytest.approx(b.as_dict()[k], abs=1e-10)


def test_alphabet_mismatch():
    aux = AuxSpec.trivial((0, 1))
    W = Channel.identity((0, 1, 2))
    with pytest.raises(ValueError):
        mi_quantities(W, W, aux)


# constraint systems ------------------------------------------------------------------------

def test_raw_system_shape_and_interior_point():
    q = MIQuantities.from_parts(0.2, 0.6, 0.3, 0.1)
    sys = raw_constraints(q)
    assert sum(c.strict for c in sys.constraints) == 5 and len(sys.constraints) == 11
    # (R, R_J, R_M, R_L, R_lam): slacks are 0.15, 0.5, 0.1, 0.2, 0.05
    assert membership_many(sys, [[0.0, 0.1, 0.2, 0.35, 0.15]], strict=True)[0]


def test_raw_system_all_zero_has_empty_interior():
    assert raw_constraints(MIQuantities(0, 0, 0, 0, 0)).open_empty


def test_reduced_empty_when_eve_sees_more():
    q = MIQuantities.from_parts(0.2, 0.1, 0.3, 0.2)
    assert reduced_constraints(q).open_empty
    assert Polytope.closure_of(reduced_constraints(q)).empty


@pytest.mark.parametrize("seed", range(5))
def test_projection_of_raw_system_is_reduced_system(seed):
    rng = np.random.default_rng(seed)
    q = random_q(rng)
    proj = project(raw_constraints(q), ["R_M", "R_L", "R_lam"])
    red = reduced_constraints(q)
    pts = box_points(rng, q)
    assert np.array_equal(membership_many(proj, pts, tol=1e-9),
                          membership_many(red, pts, tol=1e-9))


def test_alt_contained_in_reduced():
    rng = np.random.default_rng(11)
    for _ in range(30):
        q = random_q(rng)
        pts = box_points(rng, q, 500)
        alt = membership_many(alt_constraints(q), pts, tol=1e-9)
        red = membership_many(reduced_constraints(q), pts, tol=1e-9)
        assert not np.any(alt & ~red)


def test_alt_equals_reduced_when_u_less_noisy():
    rng = np.random.default_rng(12)
    for _ in range(10):
        i_u_y, i_xt_y, i_xt_z = rng.uniform(0.1, 1, 3)
        q = MIQuantities.from_parts(i_u_y, i_xt_y, i_u_y * rng.uniform(0, 1), i_xt_z)
        pts = box_points(rng, q, 500)
        assert np.array_equal(membership_many(alt_constraints(q), pts),
                              membership_many(reduced_constraints(q), pts))


def test_trivial_u_closed_region_has_three_constraints():
    # with |U| = 1 the open region is empty (R_M < 0); its closure pins R_M = 0,
    # where r2 and r4 coincide and three rate constraints remain in both systems
    q = MIQuantities.from_parts(0.0, 0.5, 0.0, 0.2)
    red, alt = reduced_constraints(q), alt_constraints(q)
    assert red.open_empty and alt.open_empty
    for sys in (red, alt):
        kept = remove_redundant(closed_reading(sys)).constraints
        rate_rows = [c for c in kept if ":" not in c.label and family_of(c.label)[-1] != "3"]
        assert len(rate_rows) == 3
    pts = box_points(np.random.default_rng(0), q, 300)
    pts[:, 0] = 0.0
    assert np.array_equal(membership_many(closed_reading(red), pts),
                          membership_many(closed_reading(alt), pts))


def test_monotone_in_bob_information():
    rng = np.random.default_rng(13)
    for _ in range(20):
        parts = rng.uniform(0, 1, 4)
        q1 = MIQuantities.from_parts(*parts)
        parts[1] += rng.uniform(0, 0.5)
        q2 = MIQuantities.from_parts(*parts)
        pts = box_points(rng, q2, 300)
        small = membership_many(reduced_constraints(q1), pts, strict=True)
        big = membership_many(reduced_constraints(q2), pts, strict=True)
        assert not np.any(small & ~big)


def test_family_labels():
    assert family_of("r3:R_M>=0") == "r3" and family_of("r5") == "r5"
    assert FAMILIES == ("r1", "r2", "r3", "r4", "r5")


# admissible cardinalities -----------------------------------------------------------------------

@pytest.mark.parametrize("sizes,expected", [((2, 2, 3), (5, 15)), ((2, 2, 2), (5, 15)),
                                            ((4, 2, 2), (6, 24))])
def test_admissible_bounds(sizes, expected):
    assert admissible_bounds(*sizes) == expected


# mixing --------------------------------------------------------------------------------------------

def _mix_setup(seed):
    rng = np.random.default_rng(seed)
    aux = rand_aux(rng, 2, 3, 2)
    W_b = rand_channel(rng, 2, 3, aux.x_alphabet)
    W_e = rand_channel(rng, 2, 2, aux.x_alphabet)
    return aux, W_b, W_e


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 0.3])
def test_mixing_interpolation(alpha):
    aux, W_b, W_e = _mix_setup(3)
    q = mi_quantities(W_b, W_e, aux)
    qa = mi_quantities(W_b, W_e, mixing_aux(aux, alpha))
    assert qa.i_u_y == pytest.approx((1 - alpha) * q.i_u_y + alpha * q.i_uxt_y, abs=1e-10)
    assert qa.i_u_z == pytest.approx((1 - alpha) * q.i_u_z + alpha * q.i_uxt_z, abs=1e-10)
    assert qa.i_uxt_y == pytest.approx(q.i_uxt_y, abs=1e-10)
    for k, v in mixed_quantities(q, alpha).as_dict().items():
        assert v == pytest.approx(qa.as_dict()[k], abs=1e-10)


def test_mixing_endpoints():
    aux, W_b, W_e = _mix_setup(4)
    q = mi_quantities(W_b, W_e, aux)
    q0 = mi_quantities(W_b, W_e, mixing_aux(aux, 0.0))
    for k, v in q.as_dict().items():
        assert q0.as_dict()[k] == pytest.approx(v, abs=1e-12)
    q1 = mi_quantities(W_b, W_e, mixing_aux(aux, 1.0))
    assert q1.i_xt_y_given_u == pytest.approx(0.0, abs=1e-12)


def test_mixing_rejects_bad_alpha():
    aux, _, _ = _mix_setup(0)
    with pytest.raises(ValueError):
        mixing_aux(aux, 1.5)


# hull containment ---------------------------------------------------------------------------------

def test_classify_cases():
    assert classify(MIQuantities.from_parts(0.1, 0.1, 0.1, 0.3)) == "empty"
    assert classify(MIQuantities.from_parts(0.3, 0.5, 0.1, 0.1)) == "less-noisy-u"
    assert classify(MIQuantities.from_parts(0.1, 0.5, 0.3, 0.1)) == "ordered"
    assert classify(MIQuantities.from_parts(0.1, 0.5, 0.4, 0.3)) == "z-stronger"


def test_mixing_alpha_in_unit_interval():
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = random_q(rng)
        a = mixing_alpha(q)
        if a is not None:
            assert 0 <= a <= 1


def test_hull_empty_case():
    rep = hull_containment_check(MIQuantities.from_parts(0.1, 0.1, 0.1, 0.3))
    assert rep.case == "empty" and rep.passed


@pytest.mark.parametrize("parts", [(0.3, 0.5, 0.1, 0.1), (0.1, 0.5, 0.3, 0.1),
                                   (0.1, 0.5, 0.4, 0.3), (0.1, 0.5, 0.4, 0.0)])
def test_hull_containment_cases(parts):
    rep = hull_containment_check(MIQuantities.from_parts(*parts), samples=300, seed=1)
    assert rep.passed, rep.counterexamples


def test_hull_containment_explicit_mixing():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 2:
        aux = rand_aux(rng, 2, 2, 2)
        W_b = rand_channel(rng, 2, 2, aux.x_alphabet)
        W_e = rand_channel(rng, 2, 2, aux.x_alphabet)
        q = mi_quantities(W_b, W_e, aux)
        if classify(q) not in ("ordered", "z-stronger"):
            continue
        checked += 1
        rep = hull_containment_check(q, (W_b, W_e, aux), samples=200, seed=checked)
        assert rep.passed


# regions ---------------------------------------------------------------------------------------

def test_korner_example_all_families_irredundant():
    W_b, W_e, aux = ex.korner()
    reg = rate_region(W_b, W_e, [aux])
    assert irredundant_families(reg.systems[0]) == {f: True for f in FAMILIES}
    poly = reg.polytopes[0]
    labels = {family_of(c.label) for c in poly.facets}
    assert set(FAMILIES) <= labels
    vs = vertex_enumeration(poly)
    assert len(vs.points) >= 4 and all(poly.contains(p) for p in vs.points)


def test_region_union_and_empty_flag():
    W_b, W_e, aux = ex.korner()
    weak = AuxSpec.trivial(W_b.input_alphabet)
    reg = rate_region(W_b, W_e, [aux, weak])
    pts = np.random.default_rng(0).uniform(0, 0.5, size=(200, 3))
    assert np.array_equal(reg.contains_many(pts), np.array([reg.contains(p) for p in pts]))
    assert not reg.empty


def test_rate_region_requires_aux():
    W_b, W_e, _ = ex.korner()
    with pytest.raises(ValueError):
        rate_region(W_b, W_e, [])


def test_gnuplot_data_has_facets():
    W_b, W_e, aux = ex.korner()
    poly = rate_region(W_b, W_e, [aux]).polytopes[0]
    text = gnuplot_data(poly, vertex_enumeration(poly))
    assert text.count("# facet") == len(poly.facets)
