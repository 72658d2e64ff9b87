"""Coprime weight pairs ordered by slope, slope reduction and lc slopes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .ideals import RIdeal, weighted_order
from .numeric import as_rational


class LcViolation(ValueError):
    """The pair is not lc, so slopes are meaningless."""


@dataclass(frozen=True, order=True)
class SlopePair:
    w1: int
    w2: int

    def __post_init__(self):
        w1, w2 = int(self.w1), int(self.w2)
        if w1 < 1 or w2 < 1:
            raise ValueError("slope pairs have positive entries")
        if gcd(w1, w2) != 1:
            raise ValueError(f"({w1},{w2}) is not coprime")
        if w2 > w1:
            raise ValueError(f"({w1},{w2}) has w2 > w1")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @property
    def slope(self) -> Fraction:
        return Fraction(self.w1, self.w2)

    def as_tuple(self) -> tuple:
        return (self.w1, self.w2)

    def __str__(self) -> str:
        return f"({self.w1},{self.w2})"


def enumerate_Pn(n: int) -> list:
    """Coprime ``(w1, w2)`` with ``w2 <= w1 <= n``, by slope then lexicographically."""
    if n < 1:
        raise ValueError("n must be positive")
    pairs = [SlopePair(w1, w2) for w1 in range(1, n + 1) for w2 in range(1, w1 + 1) if gcd(w1, w2) == 1]
    return sorted(pairs, key=lambda p: (p.slope, p.w1, p.w2))


def enumerate_Qn(n: int) -> list:
    return [p.slope for p in enumerate_Pn(n)]


def reduce_slope(p: SlopePair, n: int) -> SlopePair:
    """The pair ``(v1, v2)`` with ``w1*v2 - w2*v1 = 1`` and ``0 <= v1 < w1``."""
    if p.w1 <= n:
        raise ValueError(f"{p} already lies in P_{n}; no reduction needed")
    w1, w2 = p.w1, p.w2
    v1 = (-pow(w2, -1, w1)) % w1
    v2, rem = divmod(1 + w2 * v1, w1)
    if rem or v1 == 0 or v2 < 1:
        raise ValueError(f"no admissible reduction for {p}")
    return SlopePair(v1, v2)


def detect_lc_slope(a: RIdeal, p: SlopePair) -> bool:
    """Whether ``ord_(w1, w2, 0)(a) = w1 + w2``; raises if the pair is not lc."""
    if a.dim != 3:
        raise ValueError("lc slopes are defined on threefold germs")
    if a.is_monomial():
        from .mld import NotLcError, PairSpec, _require_lc

        try:
            _require_lc(PairSpec.smooth(a))
        except NotLcError as exc:
            raise LcViolation(str(exc)) from exc
    order = weighted_order(a, (p.w1, p.w2, 0))
    if order > p.w1 + p.w2:
        raise LcViolation(f"order {order} exceeds {p.w1 + p.w2}: the pair is not lc")
    return order == p.w1 + p.w2


def mediant_combine(p1: SlopePair, p2: SlopePair, c1, c2) -> SlopePair:
    c1, c2 = as_rational(c1), as_rational(c2)
    if c1 <= 0 or c2 <= 0:
        raise ValueError("combination coefficients must be positive")
    a = c1 * p1.w1 + c2 * p2.w1
    b = c1 * p1.w2 + c2 * p2.w2
    if a.denominator != 1 or b.denominator != 1:
        raise ValueError(f"combination ({a},{b}) is not integral")
    return SlopePair(int(a), int(b))
