"""Toric valuations and two-stage composed valuations on smooth threefold germs.

A composed valuation is the exceptional divisor of a second weighted blow-up
with ``wt(y1, y2, x3) = (v1, v2, 1)`` taken at the origin of the x3-chart of a
first weighted blow-up with ``wt(x1, x2, x3) = (w1, w2, 1)``.  The chart
coordinates are ``z1 = x1 / x3^w1`` and ``z2 = x2 / x3^w2``, and ``y1, y2`` are
polynomials in ``(z1, z2, x3)``.  Orders are computed by rewriting the
pulled-back function in ``(y1, y2, x3)`` with a truncated inverse of the
coordinate change, raising the truncation until a nonzero term is found.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .germ import CyclicQuotientGerm
from .ideals import MonomialIdeal, PolyComponent, RIdeal, weighted_order
from .numeric import DimensionError, Polynomial, as_rational

DEFAULT_ORDER_CAP = 2 ** 16


class OrderBoundExceeded(RuntimeError):
    """No nonzero term was found below the truncation cap."""

    def __init__(self, bound: int):
        super().__init__(f"order exceeds bound {bound}")
        self.bound = bound


class JacobianError(ValueError):
    """The second-stage system is not a regular system at the origin."""


@dataclass(frozen=True)
class WeightVector:
    entries: tuple
    germ: Optional[CyclicQuotientGerm] = None

    def __post_init__(self):
        e = tuple(as_rational(x) for x in self.entries)
        if any(x < 0 for x in e):
            raise ValueError("weights must be nonnegative")
        if all(x == 0 for x in e):
            raise ValueError("zero weight vector")
        germ = self.germ or CyclicQuotientGerm.smooth(len(e))
        if germ.dim != len(e):
            raise DimensionError("weight length differs from germ dimension")
        if not germ.contains(e):
            raise ValueError(f"{[str(x) for x in e]} is not in the lattice of {germ.label()}")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "germ", germ)

    @property
    def primitive(self) -> bool:
        return self.germ.is_primitive(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class ToricDivisor:
    """Toric divisor given by a primitive lattice weight."""

    germ: CyclicQuotientGerm
    weight: tuple

    def __post_init__(self):
        wv = WeightVector(tuple(self.weight), self.germ)
        if not wv.primitive:
            raise ValueError("toric divisors need a primitive weight")
        object.__setattr__(self, "weight", wv.entries)

    @classmethod
    def smooth(cls, weight: Sequence) -> "ToricDivisor":
        return cls(CyclicQuotientGerm.smooth(len(weight)), tuple(weight))

    def centre_support(self) -> tuple:
        """Indices of the coordinates vanishing on the centre."""
        return tuple(i for i, x in enumerate(self.weight) if x > 0)


def _check_germ(E: ToricDivisor, a: RIdeal) -> None:
    if a.dim != E.germ.dim:
        raise DimensionError("R-ideal and divisor live in different dimensions")
    q = a.quotient()
    if q is not None and q != E.germ:
        raise ValueError("R-ideal and divisor live on different germs")


def toric_ord(E: ToricDivisor, a: RIdeal) -> Fraction:
    _check_germ(E, a)
    return weighted_order(a, E.weight)


def log_discrepancy(E: ToricDivisor, a: RIdeal | None = None) -> Fraction:
    base = sum(E.weight, Fraction(0))
    if a is None:
        return base
    return base - toric_ord(E, a)


# truncated power series arithmetic ------------------------------------------


def _wdeg(e: tuple, wt: tuple) -> int:
    return wt[0] * e[0] + wt[1] * e[1] + wt[2] * e[2]


def truncate(f: Polynomial, wt: tuple, D: int) -> Polynomial:
    """Drop every term of weighted degree above ``D``."""
    return Polynomial._raw(f.dim, {e: c for e, c in f._terms.items() if _wdeg(e, wt) <= D})


def mul_trunc(f: Polynomial, g: Polynomial, wt: tuple, D: int) -> Polynomial:
    out: dict = {}
    gt = [(e, c, _wdeg(e, wt)) for e, c in g._terms.items()]
    for e1, c1 in f._terms.items():
        d1 = _wdeg(e1, wt)
        if d1 > D:
            continue
        for e2, c2, d2 in gt:
            if d1 + d2 <= D:
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                out[e] = out.get(e, 0) + c1 * c2
    return Polynomial._raw(f.dim, {e: c for e, c in out.items() if c})


def min_wdeg(f: Polynomial, wt: tuple) -> int | None:
    if f.is_zero():
        return None
    return min(_wdeg(e, wt) for e in f._terms)


def subst_trunc(f: Polynomial, z1: Polynomial, z2: Polynomial, wt: tuple, D: int) -> Polynomial:
    """``f(z1, z2, x3)`` modulo weighted degree ``> D``; x3 maps to itself."""
    pw = [[Polynomial.constant(1, 3)], [Polynomial.constant(1, 3)]]

    def power(i: int, k: int) -> Polynomial:
        lst = pw[i]
        base = z1 if i == 0 else z2
        while len(lst) <= k:
            lst.append(mul_trunc(lst[-1], base, wt, D))
        return lst[k]

    out: dict = {}
    for (a, b, c), coef in f._terms.items():
        if c > D:
            continue
        budget = D - c
        prod = mul_trunc(power(0, a), power(1, b), wt, budget) if b else power(0, a)
        for e, v in prod._terms.items():
            if _wdeg(e, wt) <= budget:
                ne = (e[0], e[1], e[2] + c)
                out[ne] = out.get(ne, 0) + coef * v
    return Polynomial._raw(3, {e: c for e, c in out.items() if c})


def _linear_split(y: Polynomial) -> tuple:
    """Split ``y`` into its (z1, z2)-linear coefficients and the remainder."""
    if y.dim != 3:
        raise DimensionError("second-stage coordinates are polynomials in (z1, z2, x3)")
    if y.constant_term() != 0:
        raise JacobianError("second-stage coordinates must vanish at the origin")
    l1 = y.coefficient((1, 0, 0))
    l2 = y.coefficient((0, 1, 0))
    rest = y - Polynomial(3, {(1, 0, 0): l1, (0, 1, 0): l2})
    return l1, l2, rest


def jacobian(y1: Polynomial, y2: Polynomial) -> tuple:
    a, b, _ = _linear_split(y1)
    c, d, _ = _linear_split(y2)
    return ((a, b), (c, d))


@functools.lru_cache(maxsize=256)
def _invert_cached(y1: Polynomial, y2: Polynomial, wt: tuple, D: int) -> tuple:
    (a, b), (c, d) = jacobian(y1, y2)
    det = a * d - b * c
    if det == 0:
        raise JacobianError("Jacobian of the second-stage system is singular at the origin")
    _, _, r1 = _linear_split(y1)
    _, _, r2 = _linear_split(y2)
    Y1 = Polynomial.variable(0, 3)
    Y2 = Polynomial.variable(1, 3)
    # z = L^{-1} (Y - R(z, x3)), iterated to a fixed point mod degree > D
    inv = ((d / det, -b / det), (-c / det, a / det))
    z1 = truncate(Y1 * inv[0][0] + Y2 * inv[0][1], wt, D)
    z2 = truncate(Y1 * inv[1][0] + Y2 * inv[1][1], wt, D)
    for _ in range(D + 2):
        s1 = Y1 - subst_trunc(r1, z1, z2, wt, D)
        s2 = Y2 - subst_trunc(r2, z1, z2, wt, D)
        n1 = truncate(s1 * inv[0][0] + s2 * inv[0][1], wt, D)
        n2 = truncate(s1 * inv[1][0] + s2 * inv[1][1], wt, D)
        if n1 == z1 and n2 == z2:
            return z1, z2
        z1, z2 = n1, n2
    raise AssertionError("coordinate inversion failed to stabilize")


def invert_regular_system(y1: Polynomial, y2: Polynomial, order_bound: int,
                          weights: Sequence[int] = (1, 1)) -> tuple:
    """Express ``z1, z2`` in ``(y1, y2, x3)`` up to weighted degree ``order_bound``.

    Variables of the result are ``(Y1, Y2, x3)`` with weights
    ``(weights[0], weights[1], 1)``; the neglected remainder has weighted
    order above ``order_bound``.
    """
    if order_bound < 1:
        raise ValueError("order_bound must be at least 1")
    wt = (int(weights[0]), int(weights[1]), 1)
    if min(wt) < 1:
        raise ValueError("second-stage weights must be positive")
    return _invert_cached(y1, y2, wt, int(order_bound))


@dataclass(frozen=True)
class ComposedValuation:
    w: tuple
    y1: Polynomial
    y2: Polynomial
    v: tuple
    order_cap: int = DEFAULT_ORDER_CAP
    strict_order: bool = field(default=True, compare=False)

    def __post_init__(self):
        w = tuple(int(x) for x in self.w)
        v = tuple(int(x) for x in self.v)
        if len(w) != 2 or len(v) != 2 or min(w + v) < 1:
            raise ValueError("weights must be pairs of positive integers")
        if self.strict_order and (w[1] > w[0] or v[1] > v[0]):
            raise ValueError("expected w2 <= w1 and v2 <= v1")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)
        (a, b), (c, d) = jacobian(self.y1, self.y2)
        if a * d - b * c == 0:
            raise JacobianError("Jacobian of the second-stage system is singular at the origin")

    @classmethod
    def monomial(cls, w, v, **kw) -> "ComposedValuation":
        return cls(tuple(w), Polynomial.variable(0, 3), Polynomial.variable(1, 3), tuple(v), **kw)

    @property
    def second_weights(self) -> tuple:
        return (self.v[0], self.v[1], 1)

    def pullback(self, f: Polynomial) -> Polynomial:
        """``f(z1 x3^w1, z2 x3^w2, x3)`` as a polynomial in ``(z1, z2, x3)``."""
        if f.dim != 3:
            raise DimensionError("composed valuations act on polynomials in (x1, x2, x3)")
        w1, w2 = self.w
        return f.map_exponents(lambda e: (e[0], e[1], e[2] + w1 * e[0] + w2 * e[1]))

    def order_from_z(self, g: Polynomial) -> int:
        """Order of a function already written in ``(z1, z2, x3)``."""
        if g.is_zero():
            raise ValueError("the zero function has infinite order")
        wt = self.second_weights
        D = max(2 * (self.v[0] + self.v[1]), 4)
        while True:
            z1, z2 = invert_regular_system(self.y1, self.y2, D, self.v)
            h = subst_trunc(g, z1, z2, wt, D)
            if not h.is_zero():
                return min_wdeg(h, wt)
            if D >= self.order_cap:
                raise OrderBoundExceeded(D)
            D = min(2 * D, self.order_cap)

    def to_json(self) -> dict:
        return {
            "w": list(self.w),
            "v": list(self.v),
            "y1": self.y1.to_json(),
            "y2": self.y2.to_json(),
            "order_cap": self.order_cap,
        }

    @classmethod
    def from_json(cls, data) -> "ComposedValuation":
        return cls(
            tuple(data["w"]),
            Polynomial.from_json(data["y1"]),
            Polynomial.from_json(data["y2"]),
            tuple(data["v"]),
            int(data.get("order_cap", DEFAULT_ORDER_CAP)),
        )


def composed_ord(V: ComposedValuation, f: Polynomial) -> int:
    """Certified ``(v1, v2, 1)``-weighted order of ``f`` after both blow-ups."""
    if f.is_zero():
        raise ValueError("the zero polynomial has infinite order")
    return V.order_from_z(V.pullback(f))


def composed_log_discrepancy(V: ComposedValuation, a: RIdeal | None = None) -> Fraction:
    """Log discrepancy of the second exceptional divisor over the original germ.

    The x3-chart contributes ``v1 + v2 + 1`` and the first exceptional divisor
    (``x3 = 0`` on the chart, order 1) contributes ``w1 + w2``.
    """
    base = Fraction(V.v[0] + V.v[1] + 1 + V.w[0] + V.w[1])
    if a is None or a.is_trivial():
        return base
    if a.dim != 3:
        raise DimensionError("composed valuations live on threefold germs")
    coords = [composed_ord(V, Polynomial.variable(i, 3)) for i in range(3)]
    total = Fraction(0)
    for comp, r in a.components:
        if isinstance(comp, MonomialIdeal):
            if comp.is_zero():
                raise ValueError("zero ideal component has infinite order")
            o = min(sum(s * c for s, c in zip(g, coords)) for g in comp.gens)
        else:
            assert isinstance(comp, PolyComponent)
            o = min(composed_ord(V, p) for p in comp.polys)
        total += r * o
    return base - total
