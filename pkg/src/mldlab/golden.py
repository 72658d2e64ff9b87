"""Frozen golden suite of published worked examples."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .blowup import (
    BlowUpSpec,
    CompositionProblem,
    charts,
    classify_contraction,
    compose_blowups,
    compose_hypothesis,
    parallel_check,
)
from .germ import CyclicQuotientGerm
from .ideals import MonomialIdeal, RIdeal, s_decomposition, truncation_ideal, weighted_order
from .numeric import Polynomial
from .slopes import SlopePair, enumerate_Pn, mediant_combine
from .valuations import (
    ComposedValuation,
    ToricDivisor,
    composed_log_discrepancy,
    composed_ord,
    invert_regular_system,
    log_discrepancy,
)


@dataclass(frozen=True)
class GoldenItem:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _x(i: int) -> Polynomial:
    return Polynomial.variable(i, 3)


def _example_valuation() -> ComposedValuation:
    # second system (y1 + y2^2, y2) with wt (5, 2, 1) after wt (3, 2, 1)
    z1, z2 = _x(0), _x(1)
    return ComposedValuation((3, 2), z1 + z2 ** 2, z2, (5, 2))


def _types_match(found, expected) -> bool:
    found = [g for g in found if not g.is_smooth]
    if len(found) != len(expected):
        return False
    return all(any(f.equivalent(e) for f in found) for e in expected)


def _check_pullback():
    V = _example_valuation()
    got = V.pullback(_x(0))
    want = Polynomial.monomial((1, 0, 3))
    return got == want, f"x1 pulls back to {got}"


def _check_inversion():
    z1, z2 = _x(0), _x(1)
    a, b = invert_regular_system(z1 + z2 ** 2, z2, 20, (5, 2))
    ok = a == _x(0) - _x(1) ** 2 and b == _x(1)
    return ok, f"z1 = {a}, z2 = {b}"


def _check_example_orders():
    V = _example_valuation()
    ords = tuple(composed_ord(V, _x(i)) for i in range(3))
    return ords == (7, 4, 1), f"orders {ords}"


def _check_example_discrepancy():
    aF = composed_log_discrepancy(_example_valuation())
    return aF == 13, f"log discrepancy {aF}"


def _check_example_hypothesis():
    h = compose_hypothesis((3, 2), (5, 2))
    return h is False, f"hypothesis {h}"


def _check_example_parallel():
    res = parallel_check((7, 4, 1), (7, 4, 1), 13)
    return res == "strictly-smaller", res


def _check_toric_discrepancy():
    aE = log_discrepancy(ToricDivisor.smooth((3, 2, 1)))
    return aE == 6, f"log discrepancy {aE}"


def _check_lc_slope_condition():
    a = RIdeal.single(MonomialIdeal(3, ((2, 0, 0), (0, 3, 0))), Fraction(5, 6))
    aE = log_discrepancy(ToricDivisor.smooth((3, 2, 0)), a)
    return aE == 0, f"log discrepancy {aE}"


def _check_quotient_discrepancy():
    germ = CyclicQuotientGerm(5, (2, 3, 1))
    aE = log_discrepancy(ToricDivisor(germ, (Fraction(2, 5), Fraction(3, 5), Fraction(1, 5))))
    return aE == Fraction(6, 5), f"log discrepancy {aE}"


def _check_truncation_window():
    w1, w2, n = 3, 2, 2
    lo = (w1 + w2) * n
    gens = truncation_ideal(w1, w2, n).gens
    ok = all(lo <= w1 * g[0] + w2 * g[1] + g[2] < lo + w1 for g in gens)
    return ok, f"{len(gens)} generators in [{lo}, {lo + w1})"


def _check_diagonal_in_lower_part():
    ok = True
    for w1, w2, n in [(3, 2, 2), (5, 3, 1), (7, 2, 3)]:
        dec = s_decomposition(w1, w2, n)
        ok = ok and (n, n) in dec.s_minus and dec.s3[(n, n)] == 0
    return ok, "(n, n) lies in the lower part with zero third exponent"


def _check_smooth_charts():
    atlas = charts(BlowUpSpec.smooth((3, 2, 1)))
    want = [CyclicQuotientGerm(3, (-1, 2, 1)), CyclicQuotientGerm(2, (3, -1, 1))]
    found = [c.germ for c in atlas.charts]
    return _types_match(found, want), ", ".join(c.germ.normalized().label() for c in atlas.charts)


def _check_quotient_contraction():
    rec = classify_contraction(CyclicQuotientGerm(5, (2, 3, 1)))
    want = [CyclicQuotientGerm(2, (-5, 5, 1)), CyclicQuotientGerm(3, (5, -5, 1))]
    ok = rec.is_contraction and rec.log_discrepancy == Fraction(6, 5) and _types_match(rec.chart_types, want)
    return ok, f"a_F {rec.log_discrepancy}, charts {[t.normalized().label() for t in rec.chart_types]}"


def _check_smooth_contraction():
    germ = CyclicQuotientGerm.smooth(3)
    rec = classify_contraction(germ, (3, 2))
    bad = classify_contraction(germ, (4, 2))
    ok = rec.is_contraction and rec.log_discrepancy == 6 and not bad.is_contraction
    return ok, f"(3,2): {rec.reason}; (4,2): {bad.reason}"


def _check_equal_weights():
    res = compose_blowups(CompositionProblem.monomial((9, 1), (2, 2)))
    ok = res.applicable and res.case == "equal-weights" and tuple(res.weights[:2]) == (11, 3)
    return ok, f"case {res.case}, weights {res.weights}"


def _check_mediant():
    p1, p2 = SlopePair(2, 1), SlopePair(3, 1)
    # orders are superadditive, so the combined divisor has a_F <= 0
    a = RIdeal.single(MonomialIdeal(3, ((1, 1, 0),)), 1)
    p3 = mediant_combine(p1, p2, 1, 1)
    lhs = weighted_order(a, (p3.w1, p3.w2, 0))
    rhs = weighted_order(a, (p1.w1, p1.w2, 0)) + weighted_order(a, (p2.w1, p2.w2, 0))
    aF = p3.w1 + p3.w2 - lhs
    return lhs >= rhs and aF <= 0, f"combined pair {p3}, a_F {aF}"


def _check_p3():
    got = [p.as_tuple() for p in enumerate_Pn(3)]
    return got == [(1, 1), (3, 2), (2, 1), (3, 1)], f"{got}"


GOLDEN: tuple = (
    ("composed valuation pullback of x1", _check_pullback),
    ("inversion of (y1 + y2^2, y2)", _check_inversion),
    ("two-step orders of x1, x2, x3", _check_example_orders),
    ("two-step log discrepancy", _check_example_discrepancy),
    ("composition hypothesis of the two-step example", _check_example_hypothesis),
    ("parallel check against (7,4,1)", _check_example_parallel),
    ("log discrepancy of wt (3,2,1)", _check_toric_discrepancy),
    ("lc slope (3,2) of the 5/6-fold cusp", _check_lc_slope_condition),
    ("log discrepancy on 1/5(2,3,1)", _check_quotient_discrepancy),
    ("truncation generator window", _check_truncation_window),
    ("(n,n) in the lower part", _check_diagonal_in_lower_part),
    ("charts of wt (3,2,1)", _check_smooth_charts),
    ("contraction of 1/5(2,3,1)", _check_quotient_contraction),
    ("smooth contractions (3,2) and (4,2)", _check_smooth_contraction),
    ("equal second weights", _check_equal_weights),
    ("mediant superadditivity", _check_mediant),
    ("P_3 list", _check_p3),
)


def verify_golden_examples() -> list:
    """Run every golden item; failures and exceptions become report entries."""
    items = []
    check: Callable
    for name, check in GOLDEN:
        try:
            ok, detail = check()
        except Exception as exc:  # report, never abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        items.append(GoldenItem(name, bool(ok), detail))
    return items
