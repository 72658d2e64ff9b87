"""Monomial ideals, polynomial ideal components and R-ideals.

An R-ideal is a formal product ``prod_j a_j^{r_j}`` with positive rational
exponents.  Components are either :class:`MonomialIdeal` objects or
:class:`PolyComponent` lists of polynomials, which are valuated term-wise.
The module also holds the truncation combinatorics used for weighted
degenerations in three variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterable, Optional, Sequence, Union

from .germ import CyclicQuotientGerm
from .numeric import DimensionError, Polynomial, as_rational, dot


def minimalize(gens: Iterable[Sequence[int]]) -> tuple:
    """Drop every exponent that componentwise dominates another one."""
    pts = sorted({tuple(int(x) for x in g) for g in gens}, key=lambda e: (sum(e), e))
    kept: list[tuple] = []
    for p in pts:
        if not any(all(a <= b for a, b in zip(k, p)) for k in kept):
            kept.append(p)
    return tuple(sorted(kept))


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal stored by minimal generators; no generators is the zero ideal."""

    dim: int
    gens: tuple = ()
    quotient: Optional[CyclicQuotientGerm] = None

    def __post_init__(self):
        for g in self.gens:
            if len(g) != self.dim:
                raise DimensionError(f"generator {tuple(g)} has wrong length for dim {self.dim}")
            if any(int(x) < 0 for x in g):
                raise ValueError("negative exponent in generator")
        object.__setattr__(self, "gens", minimalize(self.gens))
        q = self.quotient
        if q is not None:
            if q.dim != self.dim:
                raise DimensionError("quotient germ dimension differs from ideal dimension")
            if q.is_smooth:
                object.__setattr__(self, "quotient", None)
            else:
                for g in self.gens:
                    if not q.is_invariant(g):
                        raise ValueError(f"generator {g} is not invariant under {q.label()}")

    @classmethod
    def unit(cls, dim: int, quotient=None) -> "MonomialIdeal":
        return cls(dim, ((0,) * dim,), quotient)

    @classmethod
    def zero(cls, dim: int, quotient=None) -> "MonomialIdeal":
        return cls(dim, (), quotient)

    def is_zero(self) -> bool:
        return not self.gens

    def contains(self, s: Sequence[int]) -> bool:
        if len(s) != self.dim:
            raise DimensionError("exponent length mismatch")
        return any(all(a <= b for a, b in zip(g, s)) for g in self.gens)

    def order(self, w: Sequence) -> Fraction:
        if not self.gens:
            raise ValueError("the zero ideal has infinite order")
        return min(dot(w, g) for g in self.gens)

    def __add__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        return ideal_sum(self, other)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        return ideal_product(self, other)

    def __pow__(self, n: int) -> "MonomialIdeal":
        return ideal_power(self, n)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "gens": [list(g) for g in self.gens],
            "quotient": None if self.quotient is None else {"r": self.quotient.r, "a": list(self.quotient.a)},
        }

    @classmethod
    def from_json(cls, data, dim: int | None = None) -> "MonomialIdeal":
        q = data.get("quotient")
        germ = None if q is None else CyclicQuotientGerm(int(q["r"]), tuple(q["a"]))
        d = data.get("dim", dim)
        if d is None:
            raise ValueError("monomial ideal needs a dimension")
        return cls(int(d), tuple(tuple(int(x) for x in g) for g in data["gens"]), germ)


def _same_ambient(a: MonomialIdeal, b: MonomialIdeal) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.quotient != b.quotient:
        raise ValueError("ideals live on different germs")


def ideal_sum(a: MonomialIdeal, b: MonomialIdeal) -> MonomialIdeal:
    _same_ambient(a, b)
    return MonomialIdeal(a.dim, a.gens + b.gens, a.quotient)


def ideal_product(a: MonomialIdeal, b: MonomialIdeal) -> MonomialIdeal:
    _same_ambient(a, b)
    gens = {tuple(x + y for x, y in zip(g, h)) for g in a.gens for h in b.gens}
    return MonomialIdeal(a.dim, tuple(gens), a.quotient)


def ideal_power(a: MonomialIdeal, n: int) -> MonomialIdeal:
    if n < 0:
        raise ValueError("negative ideal power")
    out = MonomialIdeal.unit(a.dim, a.quotient)
    for _ in range(n):
        out = ideal_product(out, a)
    return out


def maximal_ideal(dim: int) -> MonomialIdeal:
    return MonomialIdeal(dim, tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)))


def invariant_maximal_ideal(germ: CyclicQuotientGerm) -> MonomialIdeal:
    """Ideal of all non-constant invariant monomials on a quotient germ."""
    if germ.is_smooth:
        return maximal_ideal(germ.dim)
    # minimal invariant exponents have every entry <= r
    gens = [
        s
        for s in itertools.product(range(germ.r + 1), repeat=germ.dim)
        if any(s) and germ.is_invariant(s)
    ]
    return MonomialIdeal(germ.dim, tuple(gens), germ)


@dataclass(frozen=True)
class PolyComponent:
    """Ideal component given by nonzero polynomial generators."""

    polys: tuple

    def __post_init__(self):
        if not self.polys:
            raise ValueError("polynomial component needs at least one generator")
        dims = {p.dim for p in self.polys}
        if len(dims) != 1:
            raise DimensionError("polynomial generators have mixed dimensions")
        if any(p.is_zero() for p in self.polys):
            raise ValueError("polynomial generators must be nonzero")
        object.__setattr__(self, "polys", tuple(self.polys))

    @property
    def dim(self) -> int:
        return self.polys[0].dim

    def order(self, w: Sequence) -> Fraction:
        # term-wise monomial valuation, no cancellation analysis
        return min(dot(w, e) for p in self.polys for e in p.exponents())

    def to_json(self) -> list:
        return [p.to_json() for p in self.polys]


Component = Union[MonomialIdeal, PolyComponent]


@dataclass(frozen=True)
class RIdeal:
    """Formal product of components with positive rational exponents."""

    dim: int
    components: tuple = field(default=())

    def __post_init__(self):
        comps = []
        for comp, r in self.components:
            r = as_rational(r)
            if r <= 0:
                raise ValueError("R-ideal exponents must be positive")
            if comp.dim != self.dim:
                raise DimensionError("component dimension differs from R-ideal dimension")
            comps.append((comp, r))
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def trivial(cls, dim: int) -> "RIdeal":
        return cls(dim, ())

    @classmethod
    def single(cls, comp: Component, exp=1) -> "RIdeal":
        return cls(comp.dim, ((comp, as_rational(exp)),))

    def is_trivial(self) -> bool:
        return not self.components

    def is_monomial(self) -> bool:
        return all(isinstance(c, MonomialIdeal) for c, _ in self.components)

    def power(self, t) -> "RIdeal":
        """``a^t``: every exponent multiplied by ``t`` (t = 0 gives the trivial R-ideal)."""
        t = as_rational(t)
        if t < 0:
            raise ValueError("negative R-ideal power")
        if t == 0:
            return RIdeal.trivial(self.dim)
        return RIdeal(self.dim, tuple((c, r * t) for c, r in self.components))

    def __mul__(self, other: "RIdeal") -> "RIdeal":
        if self.dim != other.dim:
            raise DimensionError("R-ideal dimension mismatch")
        return RIdeal(self.dim, self.components + other.components)

    def pieces(self) -> list:
        """``[(r_j, [exponents of component j])]`` for order computations."""
        out = []
        for comp, r in self.components:
            if isinstance(comp, MonomialIdeal):
                if comp.is_zero():
                    raise ValueError("zero ideal component has infinite order")
                out.append((r, list(comp.gens)))
            else:
                out.append((r, sorted({e for p in comp.polys for e in p.exponents()})))
        return out

    def quotient(self) -> Optional[CyclicQuotientGerm]:
        qs = {c.quotient for c, _ in self.components if isinstance(c, MonomialIdeal)}
        qs.discard(None)
        if len(qs) > 1:
            raise ValueError("components live on different quotient germs")
        return qs.pop() if qs else None

    def to_json(self) -> dict:
        comps = []
        for comp, r in self.components:
            if isinstance(comp, MonomialIdeal):
                comps.append({"ideal": comp.to_json(), "exp": str(r)})
            else:
                comps.append({"polys": comp.to_json(), "exp": str(r)})
        return {"dim": self.dim, "components": comps}

    @classmethod
    def from_json(cls, data, dim: int | None = None) -> "RIdeal":
        comps = []
        outer = data.get("dim", dim)
        for c in data.get("components", []):
            if "ideal" in c:
                comp: Component = MonomialIdeal.from_json(c["ideal"], outer)
            else:
                comp = PolyComponent(tuple(Polynomial.from_json(p) for p in c["polys"]))
            comps.append((comp, as_rational(c["exp"])))
        d = data.get("dim", dim)
        if d is None:
            if not comps:
                raise ValueError("trivial R-ideal needs an explicit dimension")
            d = comps[0][0].dim
        return cls(int(d), tuple(comps))


def weighted_order(a: Union[RIdeal, MonomialIdeal], w: Sequence) -> Fraction:
    """``sum_j r_j * min_s <w, s>`` over each component's generators or terms."""
    w = [as_rational(x) for x in w]
    if any(x < 0 for x in w):
        raise ValueError("weights must be nonnegative")
    if all(x == 0 for x in w):
        raise ValueError("zero weight vector")
    if isinstance(a, MonomialIdeal):
        return a.order(w)
    if len(w) != a.dim:
        raise DimensionError("weight length differs from R-ideal dimension")
    return sum((r * comp.order(w) for comp, r in a.components), Fraction(0))


# weighted truncation combinatorics (three variables) -------------------------


def truncation_ideal(w1: int, w2: int, n: int, d: int = 3) -> MonomialIdeal:
    """Monomials ``x^s`` with ``w1*s1 + w2*s2 + s3 >= (w1+w2)*n`` (x3 has weight 1).

    Generators come from the finite set of pairs described by
    :func:`s_decomposition`: pairs below the weighted line get the smallest
    admissible x3 exponent, pairs above it get none.
    """
    if d != 3:
        raise DimensionError("truncation ideals are defined in three variables")
    if w1 < 1 or w2 < 1 or n < 1:
        raise ValueError("weights and n must be positive")
    if w2 > w1:
        raise ValueError("expected w2 <= w1")
    dec = s_decomposition(w1, w2, n)
    gens = [(s1, s2, dec.s3[(s1, s2)]) for s1, s2 in dec.s_minus]
    gens += [(s1, s2, 0) for s1, s2 in dec.s_plus]
    return MonomialIdeal(3, tuple(gens))


@dataclass(frozen=True)
class SDecomposition:
    mu: Fraction
    s: tuple
    s_minus: tuple
    s_plus: tuple
    s3: dict  # (s1, s2) -> x3 exponent for pairs in s_minus


def s_decomposition(w1: int, w2: int, n: int) -> SDecomposition:
    if w2 > w1:
        raise ValueError("expected w2 <= w1")
    mu = Fraction(w1, w2)
    limit = (mu + 1) * n + mu
    top = floor(limit) + 1
    s = [(s1, s2) for s1 in range(top) for s2 in range(top) if s1 + s2 < limit]
    minus = [p for p in s if mu * p[0] + p[1] <= (mu + 1) * n]
    plus = [p for p in s if mu * p[0] + p[1] > (mu + 1) * n]
    s3 = {p: (w1 + w2) * n - (w1 * p[0] + w2 * p[1]) for p in minus}
    return SDecomposition(mu, tuple(s), tuple(minus), tuple(plus), s3)


def weighted_leading_part(f: Polynomial, w1, w2, D) -> Polynomial:
    """Terms of ``f`` whose ``(w1, w2, 0)``-weighted degree equals ``D``."""
    if f.dim != 3:
        raise DimensionError("expected a polynomial in three variables")
    w1, w2, D = as_rational(w1), as_rational(w2), as_rational(D)
    return Polynomial(3, {e: c for e, c in f.items() if w1 * e[0] + w2 * e[1] == D})
