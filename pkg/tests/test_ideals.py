from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mldlab.germ import CyclicQuotientGerm
from mldlab.ideals import (
    MonomialIdeal,
    PolyComponent,
    RIdeal,
    ideal_power,
    ideal_product,
    ideal_sum,
    invariant_maximal_ideal,
    maximal_ideal,
    minimalize,
    s_decomposition,
    truncation_ideal,
    weighted_leading_part,
    weighted_order,
)
from mldlab.numeric import variables
from strategies import monomial_ideals, polynomials, positive_rationals, rideals, weights

x1, x2, x3 = variables(3)


def mono(*gens):
    return MonomialIdeal(len(gens[0]), tuple(gens))


def test_minimalize_drops_dominated():
    assert minimalize([(2, 0), (3, 1), (0, 1), (2, 0)]) == ((0, 1), (2, 0))


def test_sum_examples():
    assert ideal_sum(mono((2, 0)), mono((3, 0), (0, 1))) == mono((2, 0), (0, 1))
    a = mono((1, 2, 0))
    assert ideal_sum(a, MonomialIdeal.zero(3)) == a
    total = ideal_sum(mono((1, 1, 0)), ideal_power(maximal_ideal(3), 3))
    cubes = [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]
    expected = minimalize([(1, 1, 0)] + cubes)
    assert total.gens == expected
    assert (1, 1, 0) in total.gens and (2, 1, 0) not in total.gens


def test_product_and_power_examples():
    assert ideal_product(mono((1, 0)), mono((0, 1))) == mono((1, 1))
    assert ideal_power(maximal_ideal(2), 2) == mono((2, 0), (1, 1), (0, 2))
    assert ideal_power(mono((2, 0), (0, 3)), 2) == mono((4, 0), (2, 3), (0, 6))


def test_ambient_mismatch():
    q = CyclicQuotientGerm(2, (1, 1, 1))
    with pytest.raises(ValueError):
        ideal_sum(invariant_maximal_ideal(q), maximal_ideal(3))


def test_invariant_maximal_ideal_of_half_point():
    m = invariant_maximal_ideal(CyclicQuotientGerm(2, (1, 1, 1)))
    assert len(m.gens) == 6 and all(sum(g) == 2 for g in m.gens)


def test_weighted_order_examples():
    assert weighted_order(RIdeal.single(mono((2, 0, 0), (0, 3, 0))), (3, 2, 1)) == 6
    assert weighted_order(RIdeal.single(maximal_ideal(3)), (5, 2, 7)) == 2
    a = RIdeal.single(mono((1, 1, 0)), Fraction(1, 2)) * RIdeal.single(maximal_ideal(3), 2)
    assert weighted_order(a, (1, 1, 1)) == 3
    with pytest.raises(ValueError):
        weighted_order(a, (0, 0, 0))


def test_polynomial_component_is_termwise():
    comp = PolyComponent((x1 ** 2 + x2 ** 3,))
    assert weighted_order(RIdeal.single(comp, 1), (3, 2, 0)) == 6


def test_rideal_json_round_trip():
    a = RIdeal.single(mono((1, 1, 0)), Fraction(5, 6)) * RIdeal.single(PolyComponent((x1 + x3 ** 2,)), 2)
    assert RIdeal.from_json(a.to_json()) == a
    assert RIdeal.from_json({"components": []}, dim=3).is_trivial()


def test_power_scales_exponents():
    a = RIdeal.single(maximal_ideal(3), Fraction(3, 2))
    assert a.power(Fraction(2, 3)).components[0][1] == 1
    assert a.power(0).is_trivial()


def test_truncation_examples():
    assert truncation_ideal(2, 1, 1).gens == minimalize(
        [(1, 1, 0), (1, 0, 1), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3), (2, 0, 0)]
    )
    assert truncation_ideal(1, 1, 1) == ideal_power(maximal_ideal(3), 2)
    with pytest.raises(ValueError):
        truncation_ideal(1, 2, 1)


@pytest.mark.parametrize("w1,w2,n", [(2, 1, 1), (3, 2, 1), (3, 2, 2), (5, 3, 1), (7, 2, 1)])
def test_truncation_generator_window(w1, w2, n):
    lo = (w1 + w2) * n
    for g in truncation_ideal(w1, w2, n).gens:
        assert lo <= w1 * g[0] + w2 * g[1] + g[2] <= lo + w1 - 1


def test_s_decomposition_examples():
    dec = s_decomposition(2, 1, 1)
    assert dec.mu == 2
    assert set(dec.s) == {(a, b) for a in range(5) for b in range(5) if a + b < 5}
    assert (1, 1) in dec.s_minus and dec.s3[(1, 1)] == 0
    assert (0, 3) in s_decomposition(3, 2, 1).s_plus
    for w1, w2, n in [(3, 2, 2), (4, 1, 3), (9, 5, 2)]:
        assert s_decomposition(w1, w2, n).s3[(n, n)] == 0


def test_leading_part_examples():
    f = x1 ** 2 + x2 ** 3 + x1 * x2 * x3 ** 5
    assert weighted_leading_part(f, 3, 2, 6) == x1 ** 2 + x2 ** 3
    g = x1 ** 2 + x2 ** 3 + x2 ** 2 * x3 ** 2
    assert weighted_leading_part(g, 3, 2, 6) == x1 ** 2 + x2 ** 3
    assert weighted_leading_part(g, 3, 2, 4) == x2 ** 2 * x3 ** 2
    h = x1 ** 2 * x3 + 3 * x2 ** 3
    assert weighted_leading_part(h, 3, 2, 6) == h


@given(rideals(), rideals(), weights)
def test_order_is_multiplicative(a, b, w):
    assert weighted_order(a * b, w) == weighted_order(a, w) + weighted_order(b, w)


@given(monomial_ideals(), monomial_ideals(), weights)
def test_order_of_sum_is_min(a, b, w):
    assert weighted_order(ideal_sum(a, b), w) == min(weighted_order(a, w), weighted_order(b, w))


@given(monomial_ideals(), weights, weights, positive_rationals, positive_rationals)
def test_order_is_superadditive_in_weights(a, u, v, p, q):
    combo = [p * x + q * y for x, y in zip(u, v)]
    assert weighted_order(a, combo) >= p * weighted_order(a, u) + q * weighted_order(a, v)


@given(polynomials(max_terms=6, top=4), st.integers(1, 5), st.integers(1, 5), st.integers(0, 12), weights)
def test_leading_part_subset_and_domination(f, w1, w2, D, w):
    lead = weighted_leading_part(f, w1, w2, D)
    assert all(f.coefficient(e) == c for e, c in lead.items())
    if not lead.is_zero() and not f.is_zero():
        comp_f = PolyComponent((f,))
        comp_l = PolyComponent((lead,))
        assert comp_l.order(w) >= comp_f.order(w)


def brute_force_truncation_check(w1, w2, n):
    ideal = truncation_ideal(w1, w2, n)
    top = 3 * (w1 + w2) * n
    for s in itertools.product(range(top + 1), repeat=3):
        if sum(s) > top:
            continue
        assert ideal.contains(s) == (w1 * s[0] + w2 * s[1] + s[2] >= (w1 + w2) * n), s


@pytest.mark.parametrize("w1,w2,n", [(1, 1, 1), (2, 1, 1), (3, 1, 1), (3, 2, 1)])
def test_truncation_membership_brute_force(w1, w2, n):
    brute_force_truncation_check(w1, w2, n)
