"""Cyclic quotient germs ``A^d / Z_r(a_1, ..., a_d)`` and their weight lattices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .numeric import DimensionError, as_rational


@dataclass(frozen=True)
class CyclicQuotientGerm:
    """Germ of type ``(1/r)(a_1, ..., a_d)``; ``r = 1`` is the smooth germ."""

    r: int
    a: tuple

    def __post_init__(self):
        r = int(self.r)
        if r < 1:
            raise ValueError("quotient order r must be positive")
        a = tuple(int(x) % r for x in self.a)
        if len(a) < 1:
            raise DimensionError("germ needs at least one coordinate")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", a)

    @classmethod
    def smooth(cls, dim: int) -> "CyclicQuotientGerm":
        return cls(1, (0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.a)

    @property
    def is_smooth(self) -> bool:
        return self.r == 1 or all(x == 0 for x in self.a)

    def is_invariant(self, s: Sequence[int]) -> bool:
        if len(s) != self.dim:
            raise DimensionError("exponent length differs from germ dimension")
        return sum(x * y for x, y in zip(self.a, s)) % self.r == 0

    def residue(self, w: Sequence) -> int | None:
        """The ``k`` with ``w - k*a/r`` integral, or None when ``w`` is off-lattice."""
        if len(w) != self.dim:
            raise DimensionError("weight length differs from germ dimension")
        u = [as_rational(x) * self.r for x in w]
        if any(x.denominator != 1 for x in u):
            return None
        u = [int(x) for x in u]
        for k in range(self.r):
            if all((ui - k * ai) % self.r == 0 for ui, ai in zip(u, self.a)):
                return k
        return None

    def contains(self, w: Sequence) -> bool:
        return self.residue(w) is not None

    def is_primitive(self, w: Sequence) -> bool:
        """No ``n >= 2`` with ``w/n`` still in the lattice."""
        if not self.contains(w):
            return False
        u = [int(as_rational(x) * self.r) for x in w]
        g = 0
        for x in u:
            g = gcd(g, x)
        if g == 0:
            return False
        for n in range(2, g + 1):
            if g % n == 0 and self.contains([Fraction(x, n * self.r) for x in u]):
                return False
        return True

    def primitive(self, w: Sequence) -> tuple:
        """The primitive lattice vector on the ray through ``w``."""
        w = [as_rational(x) for x in w]
        if all(x == 0 for x in w):
            raise ValueError("zero weight has no primitive representative")
        # scale to integers, then to the smallest lattice multiple
        den = 1
        for x in w:
            den = den * x.denominator // gcd(den, x.denominator)
        u = [int(x * den) for x in w]
        g = 0
        for x in u:
            g = gcd(g, x)
        u = [x // g for x in u]
        for k in range(self.r, 0, -1):
            cand = tuple(Fraction(x, k) for x in u)
            if self.contains(cand):
                return cand
        raise AssertionError("unreachable: r*Z^d lies in the lattice")

    def equivalent(self, other: "CyclicQuotientGerm") -> bool:
        """Same type up to multiplying the weight tuple by a unit mod r."""
        if self.dim != other.dim:
            return False
        if self.is_smooth or other.is_smooth:
            return self.is_smooth and other.is_smooth
        if self.r != other.r:
            return False
        r = self.r
        for k in range(1, r):
            if gcd(k, r) == 1 and all((k * x - y) % r == 0 for x, y in zip(self.a, other.a)):
                return True
        return False

    def normalized(self) -> "CyclicQuotientGerm":
        """Unit rescaling making the last coordinate 1 when possible."""
        if self.is_smooth:
            return CyclicQuotientGerm.smooth(self.dim)
        last = self.a[-1]
        if gcd(last, self.r) == 1:
            inv = pow(last, -1, self.r)
            return CyclicQuotientGerm(self.r, tuple(inv * x for x in self.a))
        return self

    def label(self) -> str:
        if self.is_smooth:
            return "smooth"
        return f"1/{self.r}(" + ",".join(str(x) for x in self.a) + ")"

    def to_json(self) -> dict:
        if self.is_smooth:
            return {"dim": self.dim}
        return {"r": self.r, "a": list(self.a)}

    @classmethod
    def from_json(cls, data) -> "CyclicQuotientGerm":
        if "r" in data:
            return cls(int(data["r"]), tuple(int(x) for x in data["a"]))
        return cls.smooth(int(data["dim"]))


def signed_label(germ: CyclicQuotientGerm) -> str:
    """Label with residues shifted into ``(-r/2, r/2]`` (e.g. ``1/5(2,-2,1)``)."""
    if germ.is_smooth:
        return "smooth"
    r = germ.r
    vals = [x - r if x > r // 2 else x for x in germ.a]
    return f"1/{r}(" + ",".join(str(x) for x in vals) + ")"
