"""Weighted blow-ups: chart atlases, weak transforms, contraction data and composition.

Charts are described torically.  For a weight ``W`` in the lattice
``N = Z^d + Z*a/r`` of the germ, the chart replacing the i-th coordinate ray
has cone generators ``g_j`` (the primitive coordinate rays, with ``W`` in
slot ``i``).  A base monomial ``x^s`` becomes ``xi^u`` with ``u_j = <g_j, s>``
in the chart's covering coordinates, and the chart is the quotient of affine
space by ``N / span(g_j)``.

The composition engine rewrites the coordinates of a two-stage tower of
weighted blow-ups so that the second exceptional divisor appears as a single
weighted blow-up of the base, following a four-step normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd
from typing import Optional, Sequence

from .germ import CyclicQuotientGerm
from .ideals import MonomialIdeal, RIdeal, ideal_power
from .numeric import DimensionError, Polynomial, as_rational
from .polyhedra import _solve_square
from .valuations import (
    ComposedValuation,
    composed_log_discrepancy,
    composed_ord,
    invert_regular_system,
    log_discrepancy,
    ToricDivisor,
    subst_trunc,
    mul_trunc,
)

ZERO = Fraction(0)


class CompositionError(RuntimeError):
    """The normalization reached a state the construction rules out."""


class CrepancyViolation(ValueError):
    """The supplied ideal does not satisfy the crepancy hypotheses."""


# charts ---------------------------------------------------------------------


@dataclass(frozen=True)
class BlowUpSpec:
    germ: CyclicQuotientGerm
    weights: tuple
    labels: Optional[tuple] = None

    def __post_init__(self):
        w = tuple(as_rational(x) for x in self.weights)
        if len(w) != self.germ.dim:
            raise DimensionError("one weight per coordinate is required")
        if any(x < 0 for x in w) or all(x == 0 for x in w):
            raise ValueError("weights must be nonnegative and not all zero")
        if not self.germ.contains(w):
            raise ValueError("weight is not in the lattice of the germ")
        object.__setattr__(self, "weights", w)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"x{i + 1}" for i in range(len(w))))

    @classmethod
    def smooth(cls, weights: Sequence) -> "BlowUpSpec":
        return cls(CyclicQuotientGerm.smooth(len(weights)), tuple(weights))

    def to_json(self) -> dict:
        return {"germ": self.germ.to_json(), "weights": [str(x) for x in self.weights]}


@dataclass(frozen=True)
class Chart:
    index: int
    germ: CyclicQuotientGerm
    generators: tuple  # rows g_j

    @property
    def smooth(self) -> bool:
        return self.germ.is_smooth

    def push(self, s: Sequence) -> tuple:
        """Exponent of ``x^s`` in the chart's covering coordinates."""
        return tuple(sum((g[k] * s[k] for k in range(len(s))), ZERO) for g in self.generators)

    def pull(self, u: Sequence) -> tuple:
        """Inverse of :meth:`push`."""
        G = [list(g) for g in self.generators]
        return tuple(_solve_square(G, [as_rational(x) for x in u]))

    def weight_in_chart(self, W: Sequence) -> tuple:
        """Coordinates of a base lattice vector in the cone basis ``g_j``."""
        d = len(W)
        GT = [[self.generators[j][k] for j in range(d)] for k in range(d)]
        return tuple(_solve_square(GT, [as_rational(x) for x in W]))

    def to_json(self) -> dict:
        return {
            "index": self.index + 1,
            "type": self.germ.normalized().label(),
            "smooth": self.smooth,
            "transition": [[str(x) for x in g] for g in self.generators],
        }


@dataclass(frozen=True)
class ChartAtlas:
    spec: BlowUpSpec
    charts: tuple

    def chart(self, i: int) -> Chart:
        for c in self.charts:
            if c.index == i:
                return c
        raise IndexError(f"no chart for coordinate {i}")

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "charts": [c.to_json() for c in self.charts]}


def _frac_part(x: Fraction) -> Fraction:
    return x - floor(x)


def _chart_group(germ: CyclicQuotientGerm, gens: list) -> CyclicQuotientGerm:
    d = germ.dim
    GT = [[gens[j][k] for j in range(d)] for k in range(d)]

    def coords(n):
        return tuple(_frac_part(x) for x in _solve_square(GT, list(n)))

    basis = [tuple(Fraction(int(i == k)) for k in range(d)) for i in range(d)]
    if not germ.is_smooth:
        basis.append(tuple(Fraction(x, germ.r) for x in germ.a))
    images = {coords(b) for b in basis}
    zero = tuple(ZERO for _ in range(d))
    group = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for g in frontier:
            for h in images:
                s = tuple(_frac_part(x + y) for x, y in zip(g, h))
                if s not in group:
                    group.add(s)
                    nxt.append(s)
        frontier = nxt
    n = len(group)
    if n == 1:
        return CyclicQuotientGerm.smooth(d)
    for g in sorted(group):
        m = 1
        for x in g:
            m = m * x.denominator // gcd(m, x.denominator)
        if m == n:
            return CyclicQuotientGerm(n, tuple(int(x * n) for x in g))
    raise NotImplementedError("chart group is not cyclic")


def charts(spec: BlowUpSpec) -> ChartAtlas:
    germ, W = spec.germ, spec.weights
    if not germ.is_primitive(W):
        raise ValueError("weights have a common factor in the lattice; primitivize them first")
    d = germ.dim
    rays = [germ.primitive(tuple(Fraction(int(i == k)) for k in range(d))) for i in range(d)]
    out = []
    for i in range(d):
        if W[i] == 0:
            continue
        gens = [W if j == i else rays[j] for j in range(d)]
        out.append(Chart(i, _chart_group(germ, gens), tuple(tuple(g) for g in gens)))
    return ChartAtlas(spec, tuple(out))


# weak transforms --------------------------------------------------------------


class TransformError(ValueError):
    """The exceptional multiplicity is not Cartier on the chart."""


def _transform_ideal(a: MonomialIdeal, chart: Chart, W: tuple) -> MonomialIdeal:
    ordE = min(sum((x * y for x, y in zip(W, s)), ZERO) for s in a.gens)
    gens = []
    for s in a.gens:
        u = list(chart.push(s))
        u[chart.index] -= ordE
        if any(x.denominator != 1 for x in u):
            raise TransformError("non-integral exponent after subtraction")
        gens.append(tuple(int(x) for x in u))
    q = chart.germ
    if not q.is_smooth and not all(q.is_invariant(g) for g in gens):
        raise TransformError("exceptional multiplicity is not Cartier on this chart")
    return MonomialIdeal(a.dim, tuple(gens), None if q.is_smooth else q)


def _cartier_power(a: MonomialIdeal, chart: Chart, W: tuple) -> int:
    for n in range(1, 10_000):
        try:
            _transform_ideal(ideal_power(a, n), chart, W)
            return n
        except TransformError:
            continue
    raise TransformError("no Cartier power found")


def weak_transform(a, spec: BlowUpSpec, chart_index: int, q_mode: bool = False):
    """Weak transform of a monomial ideal or monomial R-ideal on one chart.

    With ``q_mode`` a component whose multiplicity is not Cartier on the chart
    is replaced by its smallest good power ``a_j^n`` with exponent ``r_j/n``.
    """
    atlas = charts(spec)
    chart = atlas.chart(chart_index)
    W = spec.weights
    if isinstance(a, MonomialIdeal):
        if a.is_zero():
            return a
        try:
            return _transform_ideal(a, chart, W)
        except TransformError:
            if not q_mode:
                raise
            n = _cartier_power(a, chart, W)
            return RIdeal.single(_transform_ideal(ideal_power(a, n), chart, W), Fraction(1, n))
    if not isinstance(a, RIdeal) or not a.is_monomial():
        raise TypeError("weak transforms are defined for monomial ideals and R-ideals")
    comps = []
    for comp, r in a.components:
        try:
            comps.append((_transform_ideal(comp, chart, W), r))
        except TransformError:
            if not q_mode:
                raise
            n = _cartier_power(comp, chart, W)
            comps.append((_transform_ideal(ideal_power(comp, n), chart, W), r / n))
    return RIdeal(a.dim, tuple(comps))


# divisorial contractions --------------------------------------------------------


@dataclass(frozen=True)
class ContractionRecord:
    germ: CyclicQuotientGerm
    is_contraction: bool
    weights: Optional[tuple]
    log_discrepancy: Optional[Fraction]
    chart_types: tuple
    reason: str

    def to_json(self) -> dict:
        return {
            "germ": self.germ.label(),
            "is_contraction": self.is_contraction,
            "weights": None if self.weights is None else [str(x) for x in self.weights],
            "a_F": None if self.log_discrepancy is None else str(self.log_discrepancy),
            "chart_types": [t.normalized().label() for t in self.chart_types],
            "reason": self.reason,
        }


def terminal_quotient_form(germ: CyclicQuotientGerm) -> Optional[tuple]:
    """``(w, positions)`` if the germ is ``(1/r)(w, -w, 1)`` up to units and order."""
    r = germ.r
    if germ.dim != 3 or germ.is_smooth:
        return None
    for k in range(1, r):
        if gcd(k, r) != 1:
            continue
        b = [(k * x) % r for x in germ.a]
        for p in (2, 1, 0):
            if b[p] != 1:
                continue
            i, j = [t for t in range(3) if t != p]
            if (b[i] + b[j]) % r == 0 and gcd(b[i], r) == 1:
                return b[i], (i, j, p), tuple(b)
    return None


def classify_contraction(germ: CyclicQuotientGerm, candidate: Optional[Sequence[int]] = None) -> ContractionRecord:
    if germ.dim != 3:
        raise DimensionError("contractions are classified on threefold germs")
    if germ.is_smooth:
        if candidate is None:
            raise ValueError("a smooth germ needs candidate weights (w1, w2)")
        w1, w2 = (int(x) for x in candidate)
        if w1 < 1 or w2 < 1:
            raise ValueError("candidate weights must be positive")
        W = (Fraction(w1), Fraction(w2), Fraction(1))
        types = tuple(c.germ for c in charts(BlowUpSpec(germ, W)).charts)
        aF = Fraction(w1 + w2 + 1)
        if gcd(w1, w2) != 1:
            return ContractionRecord(germ, False, W, aF, types, "weights have a common factor")
        if w2 > w1:
            return ContractionRecord(germ, False, W, aF, types, "expected w2 <= w1")
        return ContractionRecord(germ, True, W, aF, types, "coprime pair with w2 <= w1")
    form = terminal_quotient_form(germ)
    if form is None:
        raise ValueError(f"{germ.label()} is not a terminal quotient of type 1/r(w,-w,1)")
    _, _, b = form
    W = tuple(Fraction(x, germ.r) for x in b)
    types = tuple(c.germ for c in charts(BlowUpSpec(germ, W)).charts)
    return ContractionRecord(germ, True, W, sum(W, ZERO), types, "unique contraction of a terminal quotient")


# composition of weighted blow-ups ----------------------------------------------


def compose_hypothesis(w: Sequence[int], v: Sequence[int]) -> bool:
    w1, w2 = (int(x) for x in w)
    v1, v2 = (int(x) for x in v)
    if w2 > w1 or v2 > v1:
        raise ValueError("expected w2 <= w1 and v2 <= v1")
    return (v1 - 1) // v2 <= Fraction(w1 - v1 * v1, w2)


@dataclass(frozen=True)
class CompositionProblem:
    w: tuple
    v: tuple
    y1: Polynomial
    y2: Polynomial
    ideal: Optional[RIdeal] = None
    assume_aprime: bool = True
    order_cap: int = 2 ** 16

    @classmethod
    def monomial(cls, w, v, **kw) -> "CompositionProblem":
        return cls(tuple(w), tuple(v), Polynomial.variable(0, 3), Polynomial.variable(1, 3), **kw)

    def valuation(self) -> ComposedValuation:
        return ComposedValuation(tuple(self.w), self.y1, self.y2, tuple(self.v), self.order_cap)

    def to_json(self) -> dict:
        return {
            "w": list(self.w),
            "v": list(self.v),
            "y1": self.y1.to_json(),
            "y2": self.y2.to_json(),
            "ideal": None if self.ideal is None else self.ideal.to_json(),
        }

    @classmethod
    def from_json(cls, data, **kw) -> "CompositionProblem":
        ideal = data.get("ideal")
        return cls(
            tuple(int(x) for x in data["w"]),
            tuple(int(x) for x in data["v"]),
            Polynomial.from_json(data["y1"]),
            Polynomial.from_json(data["y2"]),
            None if ideal is None else RIdeal.from_json(ideal, dim=3),
            **kw,
        )


@dataclass(frozen=True)
class CompositionResult:
    applicable: bool
    case: Optional[str] = None
    d: Optional[int] = None
    x1: Optional[Polynomial] = None
    x2: Optional[Polynomial] = None
    weights: Optional[tuple] = None
    verification: dict = field(default_factory=dict)
    flags: tuple = ()
    reason: str = ""

    def to_json(self) -> dict:
        from .numeric import to_string

        out = {"applicable": self.applicable, "reason": self.reason, "flags": list(self.flags)}
        if self.applicable:
            out.update(
                case=self.case,
                d=self.d,
                weights=list(self.weights),
                x1=to_string(self.x1),
                x2=to_string(self.x2),
                x1_json=self.x1.to_json(),
                x2_json=self.x2.to_json(),
                verification={k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.verification.items()},
            )
        return out


class _Tower:
    """Truncated expansions of base polynomials in the second-stage coordinates."""

    def __init__(self, p: CompositionProblem):
        self.V = p.valuation()
        self.w1, self.w2 = p.w
        self.v1, self.v2 = p.v
        self.wt = (self.v1, self.v2, 1)
        self.D = self.w1 + self.w2 + self.v1 + self.v2 + 2
        self.z = invert_regular_system(p.y1, p.y2, self.D, p.v)

    def expand(self, f: Polynomial) -> Polynomial:
        return subst_trunc(self.V.pullback(f), self.z[0], self.z[1], self.wt, self.D)

    def part(self, series: Polynomial, degree: int) -> Polynomial:
        wt = self.wt
        return Polynomial._raw(
            3, {e: c for e, c in series._terms.items() if wt[0] * e[0] + wt[1] * e[1] + e[2] == degree}
        )

    def below(self, series: Polynomial, degree: int) -> Polynomial:
        wt = self.wt
        return Polynomial._raw(
            3, {e: c for e, c in series._terms.items() if wt[0] * e[0] + wt[1] * e[1] + e[2] < degree}
        )


def _x3(k: int) -> Polynomial:
    if k < 0:
        raise CompositionError(f"negative x3 exponent {k}")
    return Polynomial.monomial((0, 0, k))


def _shift_down(f: Polynomial, k: int) -> Polynomial:
    if any(e[2] < k for e in f.exponents()):
        raise CompositionError("series is not divisible by the expected x3 power")
    return f.map_exponents(lambda e: (e[0], e[1], e[2] - k)) if not f.is_zero() else f


def _pow_trunc(f: Polynomial, a: int, wt: tuple, D: int) -> Polynomial:
    out = Polynomial.constant(1, 3)
    for _ in range(a):
        out = mul_trunc(out, f, wt, D)
    return out


def _lead_pair(P: Polynomial, v2: int, shift: int) -> tuple:
    """``(alpha, beta)`` with ``P = alpha*Y2*x3^shift + beta*x3^(v2+shift)``."""
    alpha = P.coefficient((0, 1, shift))
    beta = P.coefficient((0, 0, v2 + shift))
    rest = P - Polynomial(3, {(0, 1, shift): alpha, (0, 0, v2 + shift): beta})
    if not rest.is_zero():
        raise CompositionError("unexpected terms in the lowest graded piece")
    return alpha, beta


def _decompose(P: Polynomial, lead: tuple, v2: int, shift: int) -> dict:
    """Write ``P`` in the basis ``(alpha*Y2 + beta*x3^v2)^a * x3^(b + shift)``."""
    alpha, beta = lead
    if alpha == 0:
        raise CompositionError("degenerate lead in basis decomposition")
    base = Polynomial(3, {(0, 1, 0): alpha, (0, 0, v2): beta})
    coeffs: dict = {}
    while not P.is_zero():
        if any(e[0] > 0 for e in P.exponents()):
            raise CompositionError("graded piece involves y1 below its weight")
        a = max(e[1] for e in P.exponents())
        e = next(e for e in P.exponents() if e[1] == a)
        b = e[2] - shift
        c = P.coefficient(e) / alpha ** a
        coeffs[(a, b)] = coeffs.get((a, b), ZERO) + c
        term = (base ** a).map_exponents(lambda t: (t[0], t[1], t[2] + e[2]))
        P = P - term * c
    return {k: c for k, c in coeffs.items() if c}


def parallel_check(weights: Sequence, profile: Sequence, a_divisor=None) -> str:
    """Compare a weighted blow-up with a divisor whose order profile is parallel to it.

    Returns ``"equal"`` when the divisor is the weighted blow-up itself,
    ``"strictly-smaller"`` when the blow-up has smaller log discrepancy, and
    ``"not-parallel"`` otherwise.  ``a_divisor`` defaults to ``sum(profile)``.
    """
    W = [as_rational(x) for x in weights]
    P = [as_rational(x) for x in profile]
    if len(W) != len(P):
        raise DimensionError("weights and profile differ in length")
    if any(x <= 0 for x in W):
        raise ValueError("weights must be positive")
    lam = P[0] / W[0]
    if lam <= 0 or any(p != lam * w for p, w in zip(P, W)):
        return "not-parallel"
    # primitive representative of the weights
    den = 1
    for x in W:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in W]
    g = 0
    for x in ints:
        g = gcd(g, x)
    prim = [Fraction(x, g) for x in ints]
    scale = lam * W[0] / prim[0]  # profile = scale * prim
    aE = sum(P, ZERO) if a_divisor is None else as_rational(a_divisor)
    aF = sum(prim, ZERO) * scale
    if aF == aE:
        return "equal"
    if aF < aE:
        return "strictly-smaller"
    raise ValueError("log discrepancy below the parallel weighted blow-up is impossible")


def _check_crepancy(p: CompositionProblem) -> None:
    a = p.ideal
    E = ToricDivisor.smooth((p.w[0], p.w[1], 1))
    aE = log_discrepancy(E, a)
    if aE != 1:
        raise CrepancyViolation(f"first divisor has log discrepancy {aE}, expected 1")
    aF = composed_log_discrepancy(p.valuation(), a)
    if aF != 1:
        raise CrepancyViolation(f"second divisor has log discrepancy {aF}, expected 1")


def compose_blowups(p: CompositionProblem) -> CompositionResult:
    w1, w2 = (int(x) for x in p.w)
    v1, v2 = (int(x) for x in p.v)
    if not compose_hypothesis((w1, w2), (v1, v2)):
        return CompositionResult(False, reason="hypothesis floor((v1-1)/v2) <= (w1-v1^2)/w2 fails")
    flags: list[str] = []
    if p.ideal is not None:
        _check_crepancy(p)
        flags.append("crepancy checked")
    T = _Tower(p)
    X1, X2, X3 = (Polynomial.variable(i, 3) for i in range(3))
    x1c, x2c = X1, X2

    # Step 1: remove pure x3 tails below v2
    for idx in (0, 1):
        wi = (w1, w2)[idx]
        cur = x1c if idx == 0 else x2c
        low = T.below(T.expand(cur), wi + v2)
        if any(e[0] or e[1] for e in low.exponents()):
            raise CompositionError("y terms below the second weight")
        cur = cur - low
        if idx == 0:
            x1c = cur
        else:
            x2c = cur
    if p.v[0] == p.v[1]:
        return _finish(p, T, "equal-weights", 0, x1c, x2c, flags)

    # Step 2: z2 independent of x3^v2 in the lowest graded piece
    alpha, beta = _lead_pair(T.part(T.expand(x2c), w2 + v2), v2, w2)
    if alpha != 0:
        for v in range(v2, v1):
            P = T.part(T.expand(x1c), w1 + v)
            for (a, b), c in sorted(_decompose(P, (alpha, beta), v2, w1).items()):
                e = w1 - w2 * a + b
                if e < 0:
                    return CompositionResult(False, reason="negative x3 exponent in step 2", flags=tuple(flags))
                x1c = x1c - (x2c ** a) * _x3(e) * c
        return _finish(p, T, "step2", 0, x1c, x2c, flags)

    # Step 3: z2 dependent; switch the roles of z1 and z2
    x2c = x2c - _x3(w2 + v2) * beta
    lead1 = _lead_pair(T.part(T.expand(x1c), w1 + v2), v2, w1)
    if lead1[0] == 0:
        raise CompositionError("first coordinate has no y2 component; system is not regular")
    z1s = _shift_down(T.expand(x1c), w1)
    res = _shift_down(T.expand(x2c), w2)
    if not T.below(res, v2 + 1).is_zero():
        raise CompositionError("second coordinate still has order v2")
    q2: dict = {}
    for v in range(v2 + 1, v1):
        P = T.part(res, v)
        for (a, b), c in _decompose(P, lead1, v2, 0).items():
            if b < 0:
                raise CompositionError("negative x3 exponent in step 3")
            q2[(a, b)] = c
            res = res - mul_trunc(_pow_trunc(z1s, a, T.wt, T.D), _x3(b), T.wt, T.D) * c
    for (a, b), c in sorted(q2.items()):
        if a == 0:
            x2c = x2c - _x3(w2 + b) * c
    q2 = {k: c for k, c in q2.items() if k[0] >= 1}
    if not q2:
        return _finish(p, T, "step3-q2zero", v1 - v2, x1c, x2c, flags)
    level = min(v2 * a + b for a, b in q2)
    a_prime = max(a for a, b in q2 if v2 * a + b == level)
    if a_prime > 1:
        if p.ideal is not None:
            raise CrepancyViolation(f"a' = {a_prime} > 1 contradicts the crepancy hypotheses")
        return CompositionResult(False, reason=f"a' = {a_prime} > 1: no ideal can satisfy the crepancy hypotheses",
                                 flags=tuple(flags))
    if p.ideal is None:
        if not p.assume_aprime:
            return CompositionResult(False, reason="step 3 needs a' = 1; supply an ideal or assume it",
                                     flags=tuple(flags))
        flags.append("assumed a'=1")
    d = level - v2
    c1d = q2[(1, d)]
    shift = w1 - w2 - d
    if shift <= 0:
        raise CompositionError("w1 - w2 - d must be positive")

    # Step 4: x1 <- x1 - x2 x3^(w1-w2-d)/c, then clear degrees up to v1-1
    x1c = x1c - x2c * _x3(shift) * (1 / c1d)
    for v in range(level + 1, v1):
        E = T.expand(x1c)
        if not T.below(E, w1 - d + v).is_zero():
            raise CompositionError("order dropped during step 4")
        P = T.part(E, w1 - d + v)
        for (a, b), c in sorted(_decompose(P, lead1, v2, w1 - d).items()):
            e = w1 - w2 * a - d * (a + 1) + b
            if e < 0:
                raise CompositionError("negative x3 exponent in step 4")
            x1c = x1c - (x2c ** a) * _x3(e) * (c / c1d ** a)
    return _finish(p, T, "step3-general", d, x1c, x2c, flags)


def _finish(p, T, case, d, x1c, x2c, flags) -> CompositionResult:
    w1, w2 = p.w
    v1, v2 = p.v
    V = T.V
    weights = (w1 + v1 - d, w2 + v2 + d, 1)
    X3 = Polynomial.variable(2, 3)
    prof = (composed_ord(V, x1c), composed_ord(V, x2c), composed_ord(V, X3))
    aF = composed_log_discrepancy(V)
    jac = (
        (x1c.coefficient((1, 0, 0)), x1c.coefficient((0, 1, 0))),
        (x2c.coefficient((1, 0, 0)), x2c.coefficient((0, 1, 0))),
    )
    regular = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0] != 0 and x1c.constant_term() == 0 \
        and x2c.constant_term() == 0
    par = parallel_check(weights, prof, aF)
    ver = {
        "ord_x1": prof[0],
        "ord_x2": prof[1],
        "ord_x3": prof[2],
        "a_F": aF,
        "weights_sum_plus_one": sum(weights),
        "parallel": par,
        "regular": regular,
        "ok": prof == weights and aF == sum(weights) and par == "equal" and regular,
    }
    return CompositionResult(True, case, d, x1c, x2c, weights, ver, tuple(flags))
