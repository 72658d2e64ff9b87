"""Minimal log discrepancies of monomial R-ideals on smooth and cyclic quotient germs.

Everything is computed over toric valuations.  For a lattice weight ``w`` the
discrepancy functional is

    g(w) = sum(w) - sum_j r_j * min_{s in G_j} <w, s>,

which is convex and positively homogeneous.  ``mld_at_stratum`` combines an
LP over the closed simplex of directions (to detect minus infinity), a
bounded enumeration of primitive lattice points, and an LP lower bound on the
unexplored region which certifies the enumerated minimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from math import gcd
from typing import Optional, Sequence

from .germ import CyclicQuotientGerm
from .ideals import MonomialIdeal, RIdeal, invariant_maximal_ideal
from .numeric import DimensionError, as_rational
from .polyhedra import LinearProgram, solve_lp

ZERO = Fraction(0)
ONE = Fraction(1)

VALUE = "value"
MINUS_INFINITY = "minus_infinity"
UNCERTIFIED = "uncertified_above_bound"


class EngineRefusal(RuntimeError):
    """A result could not be certified and the caller demanded certainty."""


class NotLcError(ValueError):
    """The pair is not log canonical; ``direction`` has negative discrepancy."""

    def __init__(self, message: str, direction: tuple):
        super().__init__(message)
        self.direction = direction


@total_ordering
class _PlusInfinity:
    def __eq__(self, other):
        return isinstance(other, _PlusInfinity)

    def __lt__(self, other):
        return False

    def __hash__(self):
        return hash("+inf")

    def __str__(self):
        return "inf"

    __repr__ = __str__


INF = _PlusInfinity()


@dataclass(frozen=True)
class MldConfig:
    bound: int = 12
    certify: bool = True
    max_bound: int = 64


@dataclass(frozen=True)
class PairSpec:
    germ: CyclicQuotientGerm
    rideal: RIdeal

    def __post_init__(self):
        if self.rideal.dim != self.germ.dim:
            raise DimensionError("R-ideal dimension differs from germ dimension")
        if not self.rideal.is_monomial():
            raise ValueError("the mld engine needs monomial components")
        q = self.rideal.quotient()
        if q is not None and q != self.germ:
            raise ValueError("R-ideal components live on a different germ")
        if not self.germ.is_smooth:
            for comp, _ in self.rideal.components:
                if comp.quotient is None:
                    for g in comp.gens:
                        if not self.germ.is_invariant(g):
                            raise ValueError(f"generator {g} is not invariant on {self.germ.label()}")

    @classmethod
    def smooth(cls, rideal: RIdeal) -> "PairSpec":
        return cls(CyclicQuotientGerm.smooth(rideal.dim), rideal)

    @property
    def dim(self) -> int:
        return self.germ.dim

    def times(self, other: RIdeal) -> "PairSpec":
        return PairSpec(self.germ, self.rideal * other)

    def to_json(self) -> dict:
        return {"germ": self.germ.to_json(), "rideal": self.rideal.to_json()}

    @classmethod
    def from_json(cls, data) -> "PairSpec":
        germ = CyclicQuotientGerm.from_json(data["germ"])
        return cls(germ, RIdeal.from_json(data["rideal"], dim=germ.dim))


@dataclass(frozen=True)
class MldReport:
    status: str
    value: Optional[Fraction]
    witnesses: tuple
    bound_used: int
    lp_simplex_min: Optional[Fraction]
    stratum: tuple
    lower_bound: Optional[Fraction] = None

    @property
    def certified(self) -> bool:
        return self.status in (VALUE, MINUS_INFINITY)

    def to_json(self) -> dict:
        def q(x):
            return None if x is None else str(x)

        return {
            "status": self.status,
            "value": q(self.value),
            "witnesses": [[str(x) for x in w] for w in self.witnesses],
            "bound_used": self.bound_used,
            "lp_simplex_min": q(self.lp_simplex_min),
            "lower_bound": q(self.lower_bound),
            "stratum": [i + 1 for i in self.stratum],
        }


# the functional ---------------------------------------------------------------


def _pieces(pair: PairSpec) -> list:
    return [(r, comp.gens) for comp, r in pair.rideal.components]


def discrepancy_functional(pair: PairSpec, w: Sequence) -> Fraction:
    w = [as_rational(x) for x in w]
    if len(w) != pair.dim:
        raise DimensionError("weight length differs from germ dimension")
    if any(x < 0 for x in w) or not pair.germ.contains(w):
        raise ValueError("weight is not a nonnegative lattice point")
    total = sum(w, ZERO)
    for r, gens in _pieces(pair):
        total -= r * min(sum((a * b for a, b in zip(w, s)), ZERO) for s in gens)
    return total


class _IntFunctional:
    """``g`` evaluated on ``u = r*w`` with integer arithmetic."""

    def __init__(self, pair: PairSpec):
        pcs = _pieces(pair)
        L = 1
        for r, _ in pcs:
            L = L * r.denominator // gcd(L, r.denominator)
        self.L = L
        self.scale = L * pair.germ.r
        self.pieces = [(int(r * L), [tuple(s) for s in gens]) for r, gens in pcs]

    def __call__(self, u: Sequence[int]) -> int:
        val = self.L * sum(u)
        for R, gens in self.pieces:
            val -= R * min(sum(a * b for a, b in zip(u, s)) for s in gens)
        return val

    def value(self, G: int) -> Fraction:
        return Fraction(G, self.scale)


def _g_lp(pair: PairSpec, S: Sequence[int], constraints: list, lower: list) -> LinearProgram:
    """LP in variables ``(w_i for i in S) + (t_j)`` minimizing g."""
    k = len(S)
    pcs = _pieces(pair)
    m = len(pcs)
    obj = [ONE] * k + [-r for r, _ in pcs]
    cons = []
    for j, (_, gens) in enumerate(pcs):
        for s in gens:
            row = [Fraction(s[i]) for i in S] + [ZERO] * m
            row[k + j] = -ONE
            cons.append((tuple(row), ZERO))
    for a, b in constraints:
        cons.append((tuple(a) + (ZERO,) * m, b))
    return LinearProgram.build(obj, cons, list(lower) + [None] * m)


def _simplex_min(pair: PairSpec, S: Sequence[int]):
    k = len(S)
    cons = [((ONE,) * k, ONE), ((-ONE,) * k, -ONE)]
    out = solve_lp(_g_lp(pair, S, cons, [ZERO] * k))
    assert out.tag == "optimal"
    return out.value, out.point[:k]


def _region_min(pair: PairSpec, S: Sequence[int], lb: Fraction, total: Fraction) -> Fraction:
    k = len(S)
    cons = [((ONE,) * k, total)]
    out = solve_lp(_g_lp(pair, S, cons, [lb] * k))
    if out.tag != "optimal":
        raise AssertionError(f"region LP returned {out.tag}")
    return out.value


def _embed(S: Sequence[int], vals: Sequence, d: int) -> tuple:
    w = [ZERO] * d
    for i, x in zip(S, vals):
        w[i] = Fraction(x)
    return tuple(w)


def _residue_classes(germ: CyclicQuotientGerm, S: Sequence[int]) -> list:
    r = germ.r
    out = set()
    for k in range(r):
        res = tuple((k * a) % r for a in germ.a)
        if all(res[i] == 0 for i in range(germ.dim) if i not in S):
            out.add(tuple(res[i] for i in S))
    return sorted(out)


def _lattice_points(germ: CyclicQuotientGerm, S: Sequence[int], total: int):
    """Integer ``u`` on S (entries >= 1) with ``sum(u) <= total`` and ``u/r`` in the lattice."""
    r = germ.r
    k = len(S)
    for res in _residue_classes(germ, S):
        starts = [x if x > 0 else r for x in res]

        def rec(i: int, budget: int, acc: list):
            if i == k:
                yield tuple(acc)
                return
            rest_min = sum(starts[i + 1:])
            x = starts[i]
            while x + rest_min <= budget:
                acc.append(x)
                yield from rec(i + 1, budget - x, acc)
                acc.pop()
                x += r

        yield from rec(0, total, [])


def _is_primitive_u(germ: CyclicQuotientGerm, S: Sequence[int], u: Sequence[int]) -> bool:
    g = 0
    for x in u:
        g = gcd(g, x)
    if g == 1:
        return True
    classes = set(_residue_classes(germ, S)) if germ.r > 1 else None
    for n in range(2, g + 1):
        if g % n:
            continue
        v = [x // n for x in u]
        if germ.r == 1 or tuple(x % germ.r for x in v) in classes:
            return False
    return True


def _check_stratum(pair: PairSpec, stratum) -> tuple:
    d = pair.dim
    if stratum is None:
        return tuple(range(d))
    S = tuple(sorted(set(int(i) for i in stratum)))
    if not S:
        raise ValueError("stratum support must be nonempty")
    if S[0] < 0 or S[-1] >= d:
        raise ValueError(f"stratum index out of range for dimension {d}")
    return S


def mld_at_stratum(pair: PairSpec, stratum: Sequence[int] | None = None,
                   config: MldConfig = MldConfig()) -> MldReport:
    """mld at the generic point of ``{x_i = 0 : i in stratum}`` (0-based indices).

    ``stratum=None`` means every coordinate, i.e. the closed point.
    """
    S = _check_stratum(pair, stratum)
    d, germ = pair.dim, pair.germ
    k = len(S)

    if k == 1:
        # codimension one: the only divisor is the coordinate hyperplane itself
        e = germ.primitive(_embed(S, [1], d))
        val = discrepancy_functional(pair, e)
        return MldReport(VALUE, val, (e,), 1, val, S, val)

    m, point = _simplex_min(pair, S)
    if m < 0:
        w = germ.primitive(_embed(S, point, d))
        return MldReport(MINUS_INFINITY, None, (w,), 0, m, S, None)

    G = _IntFunctional(pair)
    r = germ.r
    bound = max(1, int(config.bound))

    def enumerate_upto(B: int):
        best, wit = None, []
        for v in _lattice_points(germ, S, r * B):
            u = [0] * d
            for i, x in zip(S, v):
                u[i] = x
            val = G(u)
            if best is None or val < best:
                if _is_primitive_u(germ, S, v):
                    best, wit = val, [u]
            elif val == best and _is_primitive_u(germ, S, v):
                wit.append(u)
        return best, wit

    best, wit = enumerate_upto(bound)
    if best is None:
        # no lattice point with this exact support inside the bound
        return MldReport(UNCERTIFIED, None, (), bound, m, S, None)

    lb = Fraction(1, r)
    best_val = G.value(best)
    certified = False
    lower = None
    if config.certify:
        if m * bound > 0 and m * (bound + lb) < best_val:
            # g >= m * |w|_1, so a larger box certifies once it reaches best/m
            need = int((best_val / m - lb).__ceil__())
            if need <= config.max_bound and need > bound:
                bound = need
                best, wit = enumerate_upto(bound)
                best_val = G.value(best)
        region = _region_min(pair, S, lb, bound + lb)
        lower = min(region, best_val)
        if m >= 0 and best_val == 0:
            lower = ZERO
        # lattice values lie in (1/scale)Z, so a gap below one step is enough
        certified = lower > best_val - Fraction(1, G.scale)

    witnesses = tuple(sorted(tuple(Fraction(x, r) for x in u) for u in wit))
    status = VALUE if certified else UNCERTIFIED
    return MldReport(status, best_val, witnesses, bound, m, S, lower)


def mld(pair: PairSpec, config: MldConfig = MldConfig()) -> MldReport:
    return mld_at_stratum(pair, None, config)


def brute_force_mld(pair: PairSpec, stratum: Sequence[int] | None = None, bound: int = 12) -> MldReport:
    """Plain enumeration of the ``|w|_inf <= bound`` box; no LP, no certificate."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    S = _check_stratum(pair, stratum)
    d, germ = pair.dim, pair.germ
    r = germ.r
    grid = [Fraction(i, r) for i in range(0, r * bound + 1)]
    pieces = [(rj, gens) for comp, rj in pair.rideal.components for gens in [comp.gens]]

    def g(w):
        val = sum(w, ZERO)
        for rj, gens in pieces:
            val -= rj * min(sum((a * b for a, b in zip(w, s)), ZERO) for s in gens)
        return val

    def in_lattice(w):
        u = [x * r for x in w]
        return any(all((ui - kk * ai) % r == 0 for ui, ai in zip(u, germ.a)) for kk in range(r))

    def primitive(w):
        u = [int(x * r) for x in w]
        g = 0
        for x in u:
            g = gcd(g, x)
        return not any(in_lattice([Fraction(x, n * r) for x in u]) for n in range(2, g + 1) if g % n == 0)

    best, wit = None, []
    for vals in itertools.product(grid, repeat=len(S)):
        if all(v == 0 for v in vals):
            continue
        w = [ZERO] * d
        for i, v in zip(S, vals):
            w[i] = v
        if not in_lattice(w):
            continue
        val = g(w)
        if val < 0 and len(S) >= 2:
            return MldReport(MINUS_INFINITY, None, (tuple(w),), bound, None, S, None)
        if any(v == 0 for v in vals) or not primitive(w):
            continue
        if best is None or val < best:
            best, wit = val, [tuple(w)]
        elif val == best:
            wit.append(tuple(w))
    return MldReport(UNCERTIFIED, best, tuple(sorted(wit)), bound, None, S, None)


# thresholds ---------------------------------------------------------------------


def _require_lc(pair: PairSpec) -> None:
    m, point = _simplex_min(pair, tuple(range(pair.dim)))
    if m < 0:
        w = pair.germ.primitive(point)
        raise NotLcError(f"pair is not lc: g < 0 along {[str(x) for x in w]}", w)


@dataclass(frozen=True)
class ThresholdReport:
    value: object  # Fraction or INF
    witness: Optional[tuple]

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "witness": None if self.witness is None else [str(x) for x in self.witness],
        }


def lct_report(pair: PairSpec, b: RIdeal) -> ThresholdReport:
    """Largest ``t >= 0`` with ``(germ, a * b^t)`` lc, as one LP."""
    if b.dim != pair.dim:
        raise DimensionError("auxiliary R-ideal has the wrong dimension")
    if not b.is_monomial():
        raise ValueError("auxiliary R-ideal must be monomial")
    _require_lc(pair)
    d = pair.dim
    aux = [(r, comp.gens) for comp, r in b.components]
    if not aux:
        return ThresholdReport(INF, None)
    base = _g_lp(pair, tuple(range(d)), [], [ZERO] * d)
    nb = len(pair.rideal.components)
    na = len(aux)
    n0 = base.n
    obj = tuple(base.objective) + (ZERO,) * na
    cons = [(tuple(a) + (ZERO,) * na, rhs) for a, rhs in base.constraints]
    for k, (_, gens) in enumerate(aux):
        for s in gens:
            row = [Fraction(x) for x in s] + [ZERO] * (nb + na)
            row[n0 + k] = -ONE
            cons.append((tuple(row), ZERO))
    row = [ZERO] * (n0 + na)
    for k, (r, _) in enumerate(aux):
        row[n0 + k] = r
    cons.append((tuple(row), ONE))
    lp = LinearProgram.build(obj, cons, list(base.lower) + [None] * na)
    out = solve_lp(lp)
    if out.tag == "infeasible":
        return ThresholdReport(INF, None)
    if out.tag != "optimal":
        raise AssertionError(f"threshold LP returned {out.tag}")
    return ThresholdReport(out.value, pair.germ.primitive(out.point[:d]))


def lct(pair: PairSpec, b: RIdeal):
    return lct_report(pair, b).value


def alc_threshold(pair: PairSpec, b: RIdeal, target, config: MldConfig = MldConfig()):
    """Exact ``t >= 0`` with ``mld(a * b^t) = target`` at the closed point, or None.

    ``t -> mld`` is concave, nonincreasing and piecewise linear up to the lc
    threshold.  Starting from the threshold, each step solves the linear
    piece of a current minimizer for the target, which moves strictly left
    and reaches the exact crossing after finitely many pieces.
    """
    target = as_rational(target)
    if target < 0:
        raise ValueError("target must be nonnegative")

    def phi(t):
        rep = mld(pair.times(b.power(t)) if t else pair, config)
        if rep.status == UNCERTIFIED:
            raise EngineRefusal(f"mld at t={t} is not certified")
        return rep

    start = phi(ZERO)
    if start.status == MINUS_INFINITY or start.value < target:
        return None
    if start.value == target:
        return ZERO
    L = lct(pair, b)
    if L == INF:
        return None
    t = L
    for _ in range(10_000):
        rep = phi(t)
        if rep.status == MINUS_INFINITY:
            raise AssertionError("mld is minus infinity below the lc threshold")
        if rep.value == target:
            return t
        if rep.value > target:
            return None if t == L else _raise_nonmonotone(t)
        # among minimizers take the steepest piece
        best = None
        for w in rep.witnesses:
            A = discrepancy_functional(pair, w)
            B = sum((r * min(sum((x * y for x, y in zip(w, s)), ZERO) for s in comp.gens)
                     for comp, r in b.components), ZERO)
            if B > 0:
                cand = (A - target) / B
                if best is None or cand < best:
                    best = cand
        if best is None or best >= t:
            raise AssertionError("no decreasing piece through the current minimizer")
        t = best
    raise AssertionError("threshold iteration did not terminate")


def _raise_nonmonotone(t):
    raise AssertionError(f"mld overshot the target at t={t}")


# lc centres and classification --------------------------------------------------


@dataclass(frozen=True)
class LcCentreReport:
    strata: tuple  # (support, MldReport)
    centres: tuple  # supports with mld 0
    smallest: Optional[tuple]
    dim: int

    def smallest_dimension(self) -> Optional[int]:
        return None if self.smallest is None else self.dim - len(self.smallest)

    def to_json(self) -> dict:
        return {
            "strata": [
                {"support": [i + 1 for i in S], "mld": rep.to_json()} for S, rep in self.strata
            ],
            "centres": [[i + 1 for i in S] for S in self.centres],
            "smallest": None if self.smallest is None else [i + 1 for i in self.smallest],
            "smallest_dimension": self.smallest_dimension(),
        }


def _all_strata(d: int) -> list:
    out = []
    for k in range(1, d + 1):
        out.extend(itertools.combinations(range(d), k))
    return out


def lc_centres(pair: PairSpec, config: MldConfig = MldConfig()) -> LcCentreReport:
    _require_lc(pair)
    strata, centres = [], []
    for S in _all_strata(pair.dim):
        rep = mld_at_stratum(pair, S, config)
        strata.append((S, rep))
        if rep.value == 0 and rep.certified:
            centres.append(S)
    smallest = None
    for S in centres:
        if all(set(T) <= set(S) for T in centres):
            smallest = S
    return LcCentreReport(tuple(strata), tuple(centres), smallest, pair.dim)


LABELS = ("not-lc", "lc-not-klt", "klt-not-canonical", "canonical-not-terminal", "terminal")


@dataclass(frozen=True)
class Classification:
    label: str
    simplex_min: Fraction
    exceptional_min: Optional[Fraction]
    exceptional_lower: Optional[Fraction]
    certified: bool

    def to_json(self) -> dict:
        q = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "label": self.label,
            "simplex_min": q(self.simplex_min),
            "exceptional_min": q(self.exceptional_min),
            "exceptional_lower": q(self.exceptional_lower),
            "certified": self.certified,
        }


def _klt_label(x: Fraction) -> str:
    if x > 1:
        return "terminal"
    if x == 1:
        return "canonical-not-terminal"
    return "klt-not-canonical"


def classify_pair(pair: PairSpec, config: MldConfig = MldConfig()) -> Classification:
    m, _ = _simplex_min(pair, tuple(range(pair.dim)))
    if m < 0:
        return Classification("not-lc", m, None, None, True)
    if m == 0:
        return Classification("lc-not-klt", m, None, None, True)
    best, lower = None, None
    for S in _all_strata(pair.dim):
        if len(S) < 2:
            continue
        rep = mld_at_stratum(pair, S, config)
        if rep.value is None:
            continue
        # klt already gives g > 0, so zero is a safe floor when no bound is known
        lo = rep.lower_bound if rep.lower_bound is not None else ZERO
        best = rep.value if best is None else min(best, rep.value)
        lower = lo if lower is None else min(lower, lo)
    if best is None:
        return Classification("unknown", m, None, None, False)
    hi_label, lo_label = _klt_label(best), _klt_label(lower)
    if hi_label == lo_label:
        return Classification(hi_label, m, best, lower, True)
    return Classification(f"unknown: {lo_label} or {hi_label}", m, best, lower, False)


# threefold predicates --------------------------------------------------------------


@dataclass(frozen=True)
class PredicateResult:
    value: Optional[bool]
    reason: str
    report: Optional[MldReport] = None
    witnesses: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "reason": self.reason,
            "mld": None if self.report is None else self.report.to_json(),
            "witnesses": [[str(x) for x in w] for w in self.witnesses],
        }


def _max_ideal(pair: PairSpec) -> MonomialIdeal:
    return invariant_maximal_ideal(pair.germ)


def is_semistable_type(pair: PairSpec, config: MldConfig = MldConfig()) -> PredicateResult:
    """mld 1 at the closed point and every minimizer has order 1 along the maximal ideal.

    The second condition is settled by an LP: if g exceeds 1 on the whole
    region where the maximal ideal has order at least 2, no minimizer lives
    there.  Returns None when neither proof nor counterexample is available.
    """
    if pair.dim != 3:
        raise DimensionError("semistable type is defined for threefold germs")
    rep = mld(pair, config)
    if rep.status == MINUS_INFINITY:
        return PredicateResult(False, "mld is minus infinity", rep)
    if rep.status == UNCERTIFIED:
        lo = rep.lower_bound
        if rep.value is not None and rep.value < 1:
            return PredicateResult(False, "mld below 1", rep, rep.witnesses)
        if lo is not None and lo > 1:
            return PredicateResult(False, "mld above 1", rep, rep.witnesses)
        return PredicateResult(None, "mld not certified", rep, rep.witnesses)
    if rep.value != 1:
        return PredicateResult(False, f"mld is {rep.value}, not 1", rep, rep.witnesses)
    mi = _max_ideal(pair)
    orders = [min(sum((a * b for a, b in zip(w, s)), ZERO) for s in mi.gens) for w in rep.witnesses]
    if any(o != 1 for o in orders):
        return PredicateResult(False, "a minimizer has order >= 2 along the maximal ideal", rep, rep.witnesses)
    d = pair.dim
    cons = [(tuple(Fraction(x) for x in s), Fraction(2)) for s in mi.gens]
    out = solve_lp(_g_lp(pair, tuple(range(d)), cons, [ZERO] * d))
    if out.tag == "optimal" and out.value > 1:
        return PredicateResult(True, "all minimizers have order 1 along the maximal ideal", rep, rep.witnesses)
    return PredicateResult(None, "order-2 region not excluded by LP", rep, rep.witnesses)


def is_special(pair: PairSpec, config: MldConfig = MldConfig()) -> PredicateResult:
    if pair.dim != 3:
        raise DimensionError("special pairs are defined on threefold germs")
    m, _ = _simplex_min(pair, (0, 1, 2))
    if m < 0:
        return PredicateResult(False, "not lc")
    rep = mld(pair, config)
    if rep.status != VALUE:
        return PredicateResult(None, "mld not certified", rep)
    if rep.value != 1:
        return PredicateResult(False, f"mld is {rep.value}, not 1", rep)
    cen = lc_centres(pair, config)
    if any(not r.certified for _, r in cen.strata):
        return PredicateResult(None, "some stratum mld is not certified", rep)
    dim = cen.smallest_dimension()
    if dim is None:
        return PredicateResult(False, "no smallest lc centre", rep)
    if dim != 1:
        return PredicateResult(False, f"smallest lc centre has dimension {dim}", rep)
    return PredicateResult(True, f"smallest lc centre {[i + 1 for i in cen.smallest]}", rep)
