from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mldlab.polyhedra import (
    LinearProgram,
    NewtonPolyhedron,
    audit_outcomes,
    min_convex_pl,
    polyhedron_contains,
    solve_lp,
    verify_outcome,
)


def test_box_minimum():
    lp = LinearProgram.build([1, 1], [((1, 0), 1), ((0, 1), 1)])
    out = solve_lp(lp)
    assert out.tag == "optimal" and out.value == 2 and tuple(out.point) == (1, 1)
    assert out.verify(lp)


def test_unbounded_ray():
    lp = LinearProgram.build([-1], [((1,), 0)])
    out = solve_lp(lp)
    assert out.tag == "unbounded"
    assert out.ray[0] > 0 and out.verify(lp)


def test_infeasible_farkas():
    lp = LinearProgram.build([0], [((1,), 1), ((-1,), 0)])
    out = solve_lp(lp)
    assert out.tag == "infeasible" and out.verify(lp)


def test_tampered_certificate_fails():
    lp = LinearProgram.build([1, 1], [((1, 0), 1), ((0, 1), 1)])
    out = solve_lp(lp)
    bad = type(out)(out.tag, out.value - 1, out.point, out.dual, out.bound_dual)
    assert not verify_outcome(lp, bad)


def test_audit_collects_outcomes():
    with audit_outcomes() as log:
        solve_lp(LinearProgram.build([1], [((1,), 3)]))
    assert len(log) == 1 and log[0][1].value == 3


def test_min_convex_pl_examples():
    out = min_convex_pl([((1, 0), 0), ((0, 1), 0)], LinearProgram.build([0, 0], [], [1, 1]))
    assert out.value == 1
    # a = (x1^2, x2^3), q = 1/2: max_j (sum w - q <w, s_j>)
    pieces = [((Fraction(0), 1, 1), 0), ((1, Fraction(-1, 2), 1), 0)]
    out = min_convex_pl(pieces, LinearProgram.build([0, 0, 0], [], [1, 1, 1]))
    assert out.value == 2
    g = max(sum(Fraction(c) for c in cs) + b for cs, b in pieces)  # value at (1, 1, 1)
    assert g == 2
    out = min_convex_pl([((-1,), 0)], LinearProgram.build([0], [], [0]))
    assert out.tag == "unbounded"
    with pytest.raises(ValueError):
        min_convex_pl([])


pieces_st = st.lists(
    st.tuples(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-4, 4)), min_size=1, max_size=4
)


@settings(max_examples=60)
@given(pieces_st)
def test_min_convex_pl_against_grid(pieces):
    domain = LinearProgram.build([0, 0], [((-1, 0), -3), ((0, -1), -3)], [0, 0])  # box [0, 3]^2
    out = min_convex_pl(pieces, domain)
    assert out.tag == "optimal"

    def f(w):
        return max(sum(Fraction(c) * x for c, x in zip(cs, w)) + b for cs, b in pieces)

    grid = [Fraction(k, 4) for k in range(13)]
    values = [f(w) for w in itertools.product(grid, grid)]
    assert min(values) >= out.value
    assert f(out.point[:2]) == out.value


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_random_lp_certificates_verify(rows, obj, lower):
    lp = LinearProgram.build(obj, [((a, b), c) for a, b, c in rows], lower)
    out = solve_lp(lp)
    assert out.tag in ("optimal", "unbounded", "infeasible")
    assert verify_outcome(lp, out)


def test_polyhedron_examples():
    np = NewtonPolyhedron(2, ((2, 0), (0, 3)))
    assert polyhedron_contains(np, (1, Fraction(3, 2)))
    assert not polyhedron_contains(np, (0, 0))
    assert polyhedron_contains(NewtonPolyhedron(3, ((1, 1, 1),)), (2, 1, 1))


def test_polyhedron_generators_are_minimal():
    np = NewtonPolyhedron(2, ((2, 0), (0, 2), (1, 1), (3, 3)))
    assert np.generators == ((0, 2), (2, 0))


@settings(max_examples=60)
@given(st.tuples(st.integers(0, 5), st.integers(0, 5)), st.tuples(st.integers(0, 5), st.integers(0, 5)),
       st.tuples(st.integers(0, 10), st.integers(0, 10)), st.integers(1, 2))
def test_contains_agrees_with_convex_combination_search(g, h, num, den):
    s = (Fraction(num[0], den), Fraction(num[1], den))
    np = NewtonPolyhedron(2, (g, h))
    # with two generators, s is inside iff some lam in [0, 1] gives lam*g + (1-lam)*h <= s
    found = False
    for k in range(0, 241):
        lam = Fraction(k, 240)
        if all(lam * a + (1 - lam) * b <= x for a, b, x in zip(g, h, s)):
            found = True
            break
    inside = polyhedron_contains(np, s)
    if found:
        assert inside
    else:
        # the feasible lam form an interval with endpoints of denominator dividing 2*den*span; recheck exactly
        lo, hi = Fraction(0), Fraction(1)
        for a, b, x in zip(g, h, s):
            # lam*(a-b) <= x - b
            if a > b:
                hi = min(hi, (x - b) / (a - b))
            elif a < b:
                lo = max(lo, (x - b) / (a - b))
            elif b > x:
                hi = Fraction(-1)
        assert inside == (lo <= hi)
