"""Exact rational linear programming and Newton polyhedra.

The solver is a dense two-phase tableau simplex over :class:`Fraction` with
Bland's rule.  Every outcome carries a certificate that is re-checked before
it is returned:

* optimal: a dual vector ``y >= 0`` for the rows and bound multipliers ``z``
  with ``A^T y + z = c`` and matching objective values;
* unbounded: a feasible point and a ray ``r`` with ``A r >= 0``, ``r`` inside
  the bound cone and ``c . r < 0``;
* infeasible: a Farkas pair ``(y, z)`` with ``A^T y + z = 0`` and
  ``b . y + l . z > 0``.

Programs have the shape ``minimize c.x  subject to  a_k . x >= b_k`` with a
per-variable lower bound or ``None`` for a free variable.
"""

from __future__ import annotations

import contextlib
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .numeric import DimensionError, as_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class CertificateError(RuntimeError):
    """An LP certificate failed exact re-verification (internal bug)."""


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    constraints: tuple  # of (row tuple, rhs)
    lower: tuple  # Fraction or None per variable

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", tuple(as_rational(c) for c in self.objective))
        rows = []
        for a, b in self.constraints:
            if len(a) != n:
                raise DimensionError(f"constraint row has {len(a)} entries, expected {n}")
            rows.append((tuple(as_rational(x) for x in a), as_rational(b)))
        object.__setattr__(self, "constraints", tuple(rows))
        if len(self.lower) != n:
            raise DimensionError("one lower bound (or None) per variable is required")
        object.__setattr__(
            self, "lower", tuple(None if l is None else as_rational(l) for l in self.lower)
        )

    @property
    def n(self) -> int:
        return len(self.objective)

    @classmethod
    def build(cls, objective, constraints=(), lower=None) -> "LinearProgram":
        n = len(objective)
        if lower is None:
            lower = (None,) * n
        return cls(tuple(objective), tuple(constraints), tuple(lower))

    def to_json(self) -> dict:
        return {
            "objective": [str(c) for c in self.objective],
            "constraints": [
                {"a": [str(x) for x in a], "b": str(b)} for a, b in self.constraints
            ],
            "lower": [None if l is None else str(l) for l in self.lower],
        }


@dataclass(frozen=True)
class LpOutcome:
    tag: str
    value: Optional[Fraction] = None
    point: Optional[tuple] = None
    dual: Optional[tuple] = None
    bound_dual: Optional[tuple] = None
    ray: Optional[tuple] = None
    farkas: Optional[tuple] = None
    farkas_bounds: Optional[tuple] = None

    def verify(self, lp: LinearProgram) -> bool:
        return verify_outcome(lp, self)

    def to_json(self) -> dict:
        def vec(v):
            return None if v is None else [str(x) for x in v]

        return {
            "tag": self.tag,
            "value": None if self.value is None else str(self.value),
            "point": vec(self.point),
            "dual": vec(self.dual),
            "ray": vec(self.ray),
            "farkas": vec(self.farkas),
        }


def _dotp(a, x) -> Fraction:
    return sum((p * q for p, q in zip(a, x)), ZERO)


def _feasible(lp: LinearProgram, x) -> bool:
    if len(x) != lp.n:
        return False
    for xi, li in zip(x, lp.lower):
        if li is not None and xi < li:
            return False
    return all(_dotp(a, x) >= b for a, b in lp.constraints)


def _transpose_combination(lp: LinearProgram, y) -> list:
    out = [ZERO] * lp.n
    for yk, (a, _) in zip(y, lp.constraints):
        if yk:
            for i, ai in enumerate(a):
                out[i] += yk * ai
    return out


def _bound_multipliers_ok(lp: LinearProgram, z) -> bool:
    for zi, li in zip(z, lp.lower):
        if li is None and zi != 0:
            return False
        if zi < 0:
            return False
    return True


def verify_outcome(lp: LinearProgram, out: LpOutcome) -> bool:
    """Re-check an outcome's certificate by exact arithmetic."""
    m = len(lp.constraints)
    if out.tag == "optimal":
        x, y, z = out.point, out.dual, out.bound_dual
        if x is None or y is None or z is None or len(y) != m or len(z) != lp.n:
            return False
        if not _feasible(lp, x) or any(yk < 0 for yk in y):
            return False
        if not _bound_multipliers_ok(lp, z):
            return False
        aty = _transpose_combination(lp, y)
        if any(aty[i] + z[i] != lp.objective[i] for i in range(lp.n)):
            return False
        primal = _dotp(lp.objective, x)
        dual = _dotp([b for _, b in lp.constraints], y) + sum(
            (zi * li for zi, li in zip(z, lp.lower) if li is not None), ZERO
        )
        return primal == dual == out.value
    if out.tag == "unbounded":
        x, r = out.point, out.ray
        if x is None or r is None or len(r) != lp.n or not _feasible(lp, x):
            return False
        if any(li is not None and ri < 0 for ri, li in zip(r, lp.lower)):
            return False
        if any(_dotp(a, r) < 0 for a, _ in lp.constraints):
            return False
        return _dotp(lp.objective, r) < 0
    if out.tag == "infeasible":
        y, z = out.farkas, out.farkas_bounds
        if y is None or z is None or len(y) != m or len(z) != lp.n:
            return False
        if any(yk < 0 for yk in y) or not _bound_multipliers_ok(lp, z):
            return False
        aty = _transpose_combination(lp, y)
        if any(aty[i] + z[i] != 0 for i in range(lp.n)):
            return False
        val = _dotp([b for _, b in lp.constraints], y) + sum(
            (zi * li for zi, li in zip(z, lp.lower) if li is not None), ZERO
        )
        return val > 0
    return False


# audit trail -----------------------------------------------------------------

_audit = threading.local()


@contextlib.contextmanager
def audit_outcomes() -> Iterator[list]:
    """Collect every ``(lp, outcome)`` solved inside the block."""
    stack = getattr(_audit, "stack", None)
    if stack is None:
        stack = _audit.stack = []
    log: list = []
    stack.append(log)
    try:
        yield log
    finally:
        stack.remove(log)


def _record(lp: LinearProgram, out: LpOutcome) -> None:
    for log in getattr(_audit, "stack", ()):
        log.append((lp, out))


# simplex ---------------------------------------------------------------------


def _solve_square(M: list, rhs: list) -> list:
    """Solve ``M x = rhs`` exactly for square nonsingular M."""
    n = len(M)
    A = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular basis")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        if p != 1:
            A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


class _Tableau:
    def __init__(self, rows: list, rhs: list, basis: list):
        self.T = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.basis = list(basis)

    @property
    def m(self) -> int:
        return len(self.T)

    def pivot(self, r: int, c: int, obj: list) -> None:
        T = self.T
        p = T[r][c]
        row = [v / p for v in T[r]]
        T[r] = row
        nz = [j for j, v in enumerate(row) if v != 0]
        for k in range(self.m):
            if k != r:
                f = T[k][c]
                if f != 0:
                    Tk = T[k]
                    for j in nz:
                        Tk[j] -= f * row[j]
        f = obj[c]
        if f != 0:
            for j in nz:
                obj[j] -= f * row[j]
        self.basis[r] = c

    def reduced_costs(self, cost: list) -> list:
        ncols = len(self.T[0]) - 1 if self.T else len(cost)
        obj = list(cost) + [ZERO]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                row = self.T[r]
                for j in range(ncols + 1):
                    if row[j] != 0:
                        obj[j] -= cb * row[j]
        return obj

    def run(self, cost: list, allowed: Sequence[bool]):
        """Bland's-rule primal simplex. Returns None or the unbounded column."""
        obj = self.reduced_costs(cost)
        ncols = len(cost)
        while True:
            enter = next(
                (j for j in range(ncols) if allowed[j] and obj[j] < 0), None
            )
            if enter is None:
                return None
            best = None
            for r in range(self.m):
                a = self.T[r][enter]
                if a > 0:
                    ratio = self.T[r][-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return enter
            self.pivot(best[1], enter, obj)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly; the returned certificate is verified."""
    out = _solve(lp)
    if not verify_outcome(lp, out):
        raise CertificateError(f"certificate failed for {out.tag} outcome")
    _record(lp, out)
    return out


def _solve(lp: LinearProgram) -> LpOutcome:
    n, m = lp.n, len(lp.constraints)
    # column layout: shifted bounded vars / split free vars, then slacks
    colmap: list[tuple] = []  # per original var: ("b", col) or ("f", plus, minus)
    ncol = 0
    for l in lp.lower:
        if l is None:
            colmap.append(("f", ncol, ncol + 1))
            ncol += 2
        else:
            colmap.append(("b", ncol))
            ncol += 1
    nstruct = ncol
    nslack = m
    ntot = nstruct + nslack
    shift = [ZERO if l is None else l for l in lp.lower]

    rows, rhs, sign = [], [], []
    for k, (a, b) in enumerate(lp.constraints):
        row = [ZERO] * ntot
        for i, ai in enumerate(a):
            cm = colmap[i]
            if cm[0] == "b":
                row[cm[1]] = ai
            else:
                row[cm[1]] = ai
                row[cm[2]] = -ai
        row[nstruct + k] = -ONE
        bk = b - _dotp(a, shift)
        s = -1 if bk < 0 else 1
        if s < 0:
            row = [-v for v in row]
            bk = -bk
        rows.append(row)
        rhs.append(bk)
        sign.append(s)

    cost = [ZERO] * ntot
    for i, ci in enumerate(lp.objective):
        cm = colmap[i]
        cost[cm[1]] = ci
        if cm[0] == "f":
            cost[cm[2]] = -ci

    def to_original(vec_std: list) -> tuple:
        out = []
        for i, cm in enumerate(colmap):
            if cm[0] == "b":
                out.append(vec_std[cm[1]])
            else:
                out.append(vec_std[cm[1]] - vec_std[cm[2]])
        return tuple(out)

    std_rows = [list(r) for r in rows]

    def duals(basis_rows: list, basis: list, costs: list) -> list:
        # pi over the kept rows, solved from B^T pi = c_B
        B = [[std_rows[r][b] for r in basis_rows] for b in basis]
        pi_kept = _solve_square(B, [costs[b] for b in basis]) if basis else []
        pi = [ZERO] * m
        for r, p in zip(basis_rows, pi_kept):
            pi[r] = p
        return [pi[k] * sign[k] for k in range(m)]

    def bound_mult(y: list, cvec: tuple) -> tuple:
        aty = _transpose_combination(lp, y)
        return tuple(
            ZERO if lp.lower[i] is None else cvec[i] - aty[i] for i in range(n)
        )

    # phase 1 with one artificial per row
    art0 = ntot
    p1_rows = [r + [ONE if j == k else ZERO for j in range(m)] for k, r in enumerate(rows)]
    tab = _Tableau(p1_rows, rhs, [art0 + k for k in range(m)])
    p1_cost = [ZERO] * ntot + [ONE] * m
    tab.run(p1_cost, [True] * (ntot + m))
    infeas = sum((tab.T[r][-1] for r, b in enumerate(tab.basis) if b >= art0), ZERO)
    row_ids = list(range(m))
    if infeas > 0:
        full_rows = [r + [ONE if j == k else ZERO for j in range(m)] for k, r in enumerate(rows)]
        B = [[full_rows[r][b] for r in range(m)] for b in tab.basis]
        pit = _solve_square(B, [p1_cost[b] for b in tab.basis])
        y = tuple(pit[k] * sign[k] for k in range(m))
        z = tuple(
            ZERO if lp.lower[i] is None else -_transpose_combination(lp, y)[i]
            for i in range(n)
        )
        return LpOutcome("infeasible", farkas=y, farkas_bounds=z)

    # drive artificials out of the basis; drop redundant rows
    r = 0
    while r < tab.m:
        b = tab.basis[r]
        if b >= art0:
            col = next((j for j in range(ntot) if tab.T[r][j] != 0), None)
            if col is None:
                del tab.T[r]
                del tab.basis[r]
                del row_ids[r]
                continue
            tab.pivot(r, col, [ZERO] * (ntot + m + 1))
        r += 1
    tab.T = [row[:ntot] + [row[-1]] for row in tab.T]

    ray_col = tab.run(cost, [True] * ntot)
    xstd = [ZERO] * ntot
    for r, b in enumerate(tab.basis):
        xstd[b] = tab.T[r][-1]
    x = tuple(s + v for s, v in zip(shift, to_original(xstd)))
    if ray_col is not None:
        d = [ZERO] * ntot
        d[ray_col] = ONE
        for r, b in enumerate(tab.basis):
            d[b] = -tab.T[r][ray_col]
        return LpOutcome("unbounded", point=x, ray=to_original(d))
    y = duals(row_ids, tab.basis, cost)
    z = bound_mult(y, lp.objective)
    return LpOutcome(
        "optimal",
        value=_dotp(lp.objective, x),
        point=x,
        dual=tuple(y),
        bound_dual=z,
    )


def min_convex_pl(pieces: Sequence[tuple], domain: LinearProgram | None = None,
                  dim: int | None = None) -> LpOutcome:
    """Minimize ``w -> max_j (c_j . w + b_j)`` over the domain's constraints.

    ``pieces`` is a list of ``(c_j, b_j)``.  The domain contributes its
    constraints and lower bounds (its objective is ignored).  The epigraph
    variable is appended as the last coordinate of the returned point.
    """
    if not pieces:
        raise ValueError("at least one affine piece is required")
    n = len(pieces[0][0]) if dim is None else dim
    if domain is None:
        domain = LinearProgram.build([ZERO] * n)
    if domain.n != n:
        raise DimensionError("domain and pieces disagree on dimension")
    cons = [(tuple(a) + (ZERO,), b) for a, b in domain.constraints]
    for c, b in pieces:
        if len(c) != n:
            raise DimensionError("piece has wrong dimension")
        # t - c.w >= b
        cons.append((tuple(-as_rational(x) for x in c) + (ONE,), as_rational(b)))
    lp = LinearProgram.build([ZERO] * n + [ONE], cons, tuple(domain.lower) + (None,))
    return solve_lp(lp)


# Newton polyhedra ------------------------------------------------------------


def _contains(gens: Sequence[tuple], s: Sequence[Fraction]) -> bool:
    k, d = len(gens), len(s)
    if k == 0:
        return False
    cons = [((ONE,) * k, ONE), ((-ONE,) * k, -ONE)]
    for i in range(d):
        cons.append((tuple(-Fraction(g[i]) for g in gens), -as_rational(s[i])))
    lp = LinearProgram.build([ZERO] * k, cons, [ZERO] * k)
    return solve_lp(lp).tag == "optimal"


@dataclass(frozen=True)
class NewtonPolyhedron:
    """``conv(generators) + R_{>=0}^d`` stored by an inclusion-minimal generator set."""

    dim: int
    generators: tuple = field(default=())

    def __post_init__(self):
        gens = sorted({tuple(int(x) for x in g) for g in self.generators})
        for g in gens:
            if len(g) != self.dim:
                raise DimensionError(f"generator {g} has wrong length")
        # cheap domination pass, then LP redundancy
        gens = [g for g in gens if not any(h != g and all(a <= b for a, b in zip(h, g)) for h in gens)]
        changed = True
        while changed:
            changed = False
            for g in gens:
                rest = [h for h in gens if h != g]
                if rest and _contains(rest, g):
                    gens = rest
                    changed = True
                    break
        object.__setattr__(self, "generators", tuple(gens))


def polyhedron_contains(np: NewtonPolyhedron, s: Sequence) -> bool:
    if len(s) != np.dim:
        raise DimensionError("point and polyhedron dimensions differ")
    return _contains(np.generators, [as_rational(x) for x in s])
