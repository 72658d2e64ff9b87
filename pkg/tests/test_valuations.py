from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mldlab.germ import CyclicQuotientGerm
from mldlab.ideals import MonomialIdeal, RIdeal, invariant_maximal_ideal
from mldlab.numeric import Polynomial, variables
from mldlab.valuations import (
    ComposedValuation,
    JacobianError,
    OrderBoundExceeded,
    ToricDivisor,
    WeightVector,
    composed_log_discrepancy,
    composed_ord,
    invert_regular_system,
    log_discrepancy,
    toric_ord,
)
from strategies import rideals

x1, x2, x3 = variables(3)


def mono(*gens):
    return RIdeal.single(MonomialIdeal(3, tuple(gens)))


def example_valuation():
    return ComposedValuation((3, 2), x1 + x2 ** 2, x2, (5, 2))


def test_toric_ord_examples():
    assert toric_ord(ToricDivisor.smooth((3, 2, 1)), mono((2, 0, 0), (0, 3, 0))) == 6
    assert toric_ord(ToricDivisor.smooth((1, 1, 0)), mono((1, 1, 0))) == 2
    q = CyclicQuotientGerm(2, (1, 1, 1))
    E = ToricDivisor(q, (Fraction(1, 2),) * 3)
    assert toric_ord(E, RIdeal.single(invariant_maximal_ideal(q))) == 1


def test_log_discrepancy_examples():
    assert log_discrepancy(ToricDivisor.smooth((3, 2, 1))) == 6
    cusp = RIdeal.single(MonomialIdeal(3, ((2, 0, 0), (0, 3, 0))), Fraction(5, 6))
    assert log_discrepancy(ToricDivisor.smooth((3, 2, 0)), cusp) == 0
    for r in range(2, 12):
        for w in range(1, r):
            if Fraction(w, r).denominator != r:
                continue
            germ = CyclicQuotientGerm(r, (w, -w, 1))
            E = ToricDivisor(germ, (Fraction(w, r), Fraction(r - w, r), Fraction(1, r)))
            assert log_discrepancy(E) == 1 + Fraction(1, r)


def test_weight_vector_checks():
    with pytest.raises(ValueError):
        WeightVector((0, 0, 0))
    with pytest.raises(ValueError):
        ToricDivisor.smooth((2, 2, 2))
    with pytest.raises(ValueError):
        WeightVector((Fraction(1, 2), 0, 0))


@given(rideals(), st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6)),
       st.builds(Fraction, st.integers(0, 9), st.integers(1, 4)))
def test_log_discrepancy_affine_in_t(a, w, t):
    from math import gcd

    g = gcd(gcd(w[0], w[1]), w[2])
    E = ToricDivisor.smooth(tuple(x // g for x in w))
    at = a.power(t)
    assert log_discrepancy(E, at) == log_discrepancy(E) - t * toric_ord(E, a)


def test_inversion_examples():
    assert invert_regular_system(x1, x2, 10) == (x1, x2)
    assert invert_regular_system(x1 + x2 ** 2, x2, 20, (5, 2)) == (x1 - x2 ** 2, x2)
    assert invert_regular_system(x1 + x3 * x2, x2, 10) == (x1 - x3 * x2, x2)
    with pytest.raises(JacobianError):
        invert_regular_system(x1 + x2, 2 * x1 + 2 * x2, 5)


def test_inversion_is_a_right_inverse_up_to_order():
    y1 = x1 + x2 ** 2 - 3 * x1 * x3
    y2 = x2 + x1 ** 2 * x3
    z1, z2 = invert_regular_system(y1, y2, 12, (2, 1))
    from mldlab.valuations import subst_trunc

    assert subst_trunc(y1, z1, z2, (2, 1, 1), 12) == x1
    assert subst_trunc(y2, z1, z2, (2, 1, 1), 12) == x2


def test_example_tower_orders_and_discrepancy():
    V = example_valuation()
    assert [composed_ord(V, v) for v in (x1, x2, x3)] == [7, 4, 1]
    assert composed_log_discrepancy(V) == 13


def test_identity_tower():
    V = ComposedValuation.monomial((1, 1), (1, 1))
    assert composed_log_discrepancy(V) == 5
    V = ComposedValuation.monomial((7, 2), (2, 1))
    assert composed_log_discrepancy(V) == 13


@pytest.mark.parametrize("w,v", [((3, 2), (5, 2)), ((7, 2), (2, 1)), ((4, 1), (3, 3))])
def test_monomial_tower_equals_toric_order(w, v):
    V = ComposedValuation.monomial(w, v)
    W = (w[0] + v[0], w[1] + v[1], 1)
    for s in itertools.product(range(9), repeat=3):
        if sum(s) > 8 or sum(s) == 0:
            continue
        assert composed_ord(V, Polynomial.monomial(s)) == sum(a * b for a, b in zip(W, s))


small_polys = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).filter(any),
    st.integers(-3, 3).filter(bool), min_size=1, max_size=3,
).map(lambda t: Polynomial(3, t))


@settings(max_examples=40)
@given(small_polys, small_polys)
def test_composed_order_is_a_valuation(f, g):
    V = example_valuation()
    assert composed_ord(V, f * g) == composed_ord(V, f) + composed_ord(V, g)


def test_order_cap_is_reported():
    capped = ComposedValuation((3, 2), x1 + x2 ** 2, x2, (5, 2), order_cap=16)
    assert composed_ord(capped, x1) == 7
    with pytest.raises(OrderBoundExceeded):
        composed_ord(capped, x3 ** 40)
    assert composed_ord(example_valuation(), x3 ** 40) == 40


def test_cancellation_inside_the_tower():
    # x1*x3 + x2^2 pulls back to x3^4 * y1
    assert composed_ord(example_valuation(), x1 * x3 + x2 ** 2) == 9


def test_raising_the_cap_keeps_results():
    f = x1 ** 2 + x2 ** 3 * x3 + x1 * x2
    results = {cap: composed_ord(ComposedValuation((3, 2), x1 + x2 ** 2, x2, (5, 2), order_cap=cap), f)
               for cap in (16, 64, 256)}
    assert len(set(results.values())) == 1


def test_json_round_trip():
    V = example_valuation()
    assert ComposedValuation.from_json(V.to_json()) == V


def test_composed_discrepancy_with_ideal():
    V = ComposedValuation.monomial((3, 2), (2, 1))
    a = RIdeal.single(MonomialIdeal(3, ((1, 0, 0),)), 1)
    # orders are (5, 3, 1); x1 contributes 5
    assert composed_log_discrepancy(V, a) == 9 - 5
