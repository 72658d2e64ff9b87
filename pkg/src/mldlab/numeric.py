"""Exact rationals, exponent vectors and sparse polynomials over Q.

Rationals are :class:`fractions.Fraction`.  Polynomials are immutable and keep
their ambient dimension even when they cancel to zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

RationalLike = Union[int, Fraction, str]


class DimensionError(ValueError):
    """Raised when vectors or polynomials of different dimensions are mixed."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected on purpose: nothing in this package is inexact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def fmt_rational(q: Fraction) -> str:
    return str(q)


def dot(w: Sequence[RationalLike], s: Sequence[RationalLike]) -> Fraction:
    if len(w) != len(s):
        raise DimensionError(f"length mismatch: {len(w)} vs {len(s)}")
    return sum((as_rational(a) * as_rational(b) for a, b in zip(w, s)), Fraction(0))


Exponent = tuple


def _check_exponent(e: Iterable[int], dim: int, allow_negative: bool = False) -> tuple:
    e = tuple(int(x) for x in e)
    if len(e) != dim:
        raise DimensionError(f"exponent {e} does not have length {dim}")
    if not allow_negative and any(x < 0 for x in e):
        raise ValueError(f"negative exponent in {e}")
    return e


class Polynomial:
    """Sparse polynomial with rational coefficients in ``dim`` variables.

    Terms are stored as ``{exponent tuple: Fraction}`` with no zero
    coefficients.  Instances are hashable and must not be mutated.
    """

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple, RationalLike] | None = None):
        if dim < 1:
            raise DimensionError("dimension must be positive")
        self.dim = dim
        clean: dict[tuple, Fraction] = {}
        for e, c in (terms or {}).items():
            c = as_rational(c)
            if c:
                e = _check_exponent(e, dim)
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = cls.__new__(cls)
        p.dim = dim
        p._terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, c: RationalLike, dim: int) -> "Polynomial":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, i: int, dim: int) -> "Polynomial":
        if not 0 <= i < dim:
            raise DimensionError(f"variable index {i} out of range for dim {dim}")
        e = [0] * dim
        e[i] = 1
        return cls._raw(dim, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, e: Sequence[int], c: RationalLike = 1) -> "Polynomial":
        return cls(len(e), {tuple(e): c})

    # accessors
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (lexicographic exponent) order."""
        return sorted(self._terms.items())

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def exponents(self) -> list:
        return sorted(self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.dim, Fraction(0))

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def min_total_degree(self) -> int:
        if not self._terms:
            return -1
        return min(sum(e) for e in self._terms)

    # arithmetic
    def _same(self, other: "Polynomial") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._same(other)
            return other
        return Polynomial.constant(as_rational(other), self.dim)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = as_rational(other)
            if not c:
                return Polynomial.zero(self.dim)
            return Polynomial._raw(self.dim, {e: c * v for e, v in self._terms.items()})
        return poly_multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1, self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def map_exponents(self, fn) -> "Polynomial":
        """Apply an injective exponent map; the image dimension is inferred."""
        out: dict[tuple, Fraction] = {}
        dim = None
        for e, c in self._terms.items():
            ne = tuple(fn(e))
            dim = len(ne)
            out[ne] = out.get(ne, 0) + c
        if dim is None:
            return Polynomial.zero(len(fn((0,) * self.dim)))
        return Polynomial(dim, out)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        return poly_substitute(self, images)

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, {to_string(self)!r})"

    # serialization
    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"c": fmt_rational(c), "e": list(e)} for e, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        dim = int(data["dim"])
        terms: dict[tuple, Fraction] = {}
        for t in data.get("terms", []):
            e = _check_exponent(t["e"], dim)
            terms[e] = terms.get(e, Fraction(0)) + as_rational(t["c"])
        return cls(dim, terms)


def poly_multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    out: dict[tuple, Fraction] = {}
    for e1, c1 in f._terms.items():
        for e2, c2 in g._terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return Polynomial._raw(f.dim, {e: c for e, c in out.items() if c})


def poly_substitute(f: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Compose ``f(images[0], ..., images[d-1])`` exactly."""
    if len(images) != f.dim:
        raise DimensionError(f"need {f.dim} images, got {len(images)}")
    if not images:
        raise DimensionError("no images")
    target = images[0].dim
    for g in images:
        if g.dim != target:
            raise DimensionError("images must share a dimension")
    powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(1, target)} for _ in images]

    def power(i: int, k: int) -> Polynomial:
        cache = powers[i]
        if k not in cache:
            j = max(m for m in cache if m < k)
            p = cache[j]
            for m in range(j + 1, k + 1):
                p = p * images[i]
                cache[m] = p
        return cache[k]

    result = Polynomial.zero(target)
    for e, c in f.items():
        term = Polynomial.constant(c, target)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        result = result + term
    return result


def to_string(f: Polynomial, names: Sequence[str] | None = None) -> str:
    if f.is_zero():
        return "0"
    names = list(names) if names else [f"x{i + 1}" for i in range(f.dim)]
    parts = []
    for e, c in sorted(f._terms.items(), reverse=True):
        mono = "*".join(
            n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
        )
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


def variables(dim: int) -> list[Polynomial]:
    return [Polynomial.variable(i, dim) for i in range(dim)]
