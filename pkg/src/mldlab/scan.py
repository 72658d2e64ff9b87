"""Parameter sweeps of invariants over families of monomial R-ideals."""

from __future__ import annotations

import ast
import itertools
import operator
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .germ import CyclicQuotientGerm
from .ideals import RIdeal, invariant_maximal_ideal
from .mld import (
    INF,
    MldConfig,
    PairSpec,
    alc_threshold,
    is_semistable_type,
    is_special,
    lct,
    mld_at_stratum,
)
from .numeric import as_rational

INVARIANTS = ("mld", "lct", "alct", "semistable", "special")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: lambda a, b: Fraction(a) / Fraction(b),
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
}


def evaluate_expression(text: str, params: dict) -> Fraction:
    """Evaluate an arithmetic template such as ``"3-1/i"`` exactly.

    Only integer literals, parameter names, ``+ - * / // %``, unary minus and
    ``**`` with a nonnegative integer exponent are accepted.
    """

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in params:
                raise ValueError(f"unknown parameter {node.id!r}")
            return Fraction(params[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = ev(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                if b.denominator != 1 or b < 0 or b > 64:
                    raise ValueError("exponents must be small nonnegative integers")
                return a ** int(b)
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise ValueError(f"operator {type(node.op).__name__} is not allowed")
            if b == 0 and isinstance(node.op, (ast.Div, ast.FloorDiv, ast.Mod)):
                raise ValueError("division by zero in template")
            return Fraction(op(a, b))
        raise ValueError(f"unsupported template syntax: {ast.dump(node)}")

    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse template {text!r}") from exc
    return ev(tree)


def _int_value(x, params: dict) -> int:
    v = evaluate_expression(x, params) if isinstance(x, str) else Fraction(x)
    if v.denominator != 1:
        raise ValueError(f"generator exponent {x!r} is not an integer")
    return int(v)


def instantiate_rideal(template: dict, params: dict, dim: int) -> RIdeal:
    """Substitute parameters into an R-ideal template in the JSON dialect."""
    comps = []
    for c in template.get("components", []):
        if "ideal" not in c:
            raise ValueError("scan families need monomial components")
        ideal = dict(c["ideal"])
        ideal["gens"] = [[_int_value(x, params) for x in g] for g in ideal["gens"]]
        ideal.setdefault("dim", dim)
        exp = c.get("exp", 1)
        exp = evaluate_expression(exp, params) if isinstance(exp, str) else as_rational(exp)
        comps.append({"ideal": ideal, "exp": str(exp)})
    return RIdeal.from_json({"dim": template.get("dim", dim), "components": comps})


def _param_values(spec) -> list:
    if isinstance(spec, list):
        return [int(x) for x in spec]
    if isinstance(spec, dict):
        lo, hi = int(spec["from"]), int(spec["to"])
        step = int(spec.get("step", 1))
        if step < 1:
            raise ValueError("parameter step must be positive")
        return list(range(lo, hi + 1, step))
    raise ValueError(f"bad parameter range {spec!r}")


@dataclass(frozen=True)
class ScanRecipe:
    family: dict
    params: dict
    invariant: str = "mld"
    germ: CyclicQuotientGerm = field(default_factory=lambda: CyclicQuotientGerm.smooth(3))
    auxiliary: Optional[dict] = None
    target: Fraction = Fraction(0)
    stratum: Optional[tuple] = None
    config: MldConfig = MldConfig()

    def __post_init__(self):
        if self.invariant not in INVARIANTS:
            raise ValueError(f"invariant must be one of {', '.join(INVARIANTS)}")
        if not self.params:
            raise ValueError("a recipe needs at least one parameter")

    def tuples(self) -> list:
        names = sorted(self.params)
        values = [_param_values(self.params[k]) for k in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*values)]

    @classmethod
    def from_json(cls, data, config: Optional[MldConfig] = None) -> "ScanRecipe":
        germ = CyclicQuotientGerm.from_json(data.get("germ", {"dim": 3}))
        cfg = data.get("config", {})
        if config is None:
            config = MldConfig(
                bound=int(cfg.get("bound", 12)),
                certify=bool(cfg.get("certify", True)),
                max_bound=int(cfg.get("max_bound", 64)),
            )
        stratum = data.get("stratum")
        return cls(
            family=data["family"],
            params=data["params"],
            invariant=data.get("invariant", "mld"),
            germ=germ,
            auxiliary=data.get("auxiliary"),
            target=as_rational(data.get("target", 0)),
            stratum=None if stratum is None else tuple(int(i) - 1 for i in stratum),
            config=config,
        )


@dataclass(frozen=True)
class ScanRow:
    params: dict
    status: str
    value: object = None
    witnesses: tuple = ()
    error: Optional[str] = None
    seconds: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "params": dict(sorted(self.params.items())),
            "status": self.status,
            "value": _render(self.value),
            "witnesses": [[str(x) for x in w] for w in self.witnesses],
            "error": self.error,
        }
        if self.seconds is not None:
            out["seconds"] = round(self.seconds, 6)
        return out


def _render(v):
    if v is None or isinstance(v, bool):
        return v
    return str(v)


@dataclass(frozen=True)
class ScanResult:
    recipe: ScanRecipe
    rows: tuple
    distinct: tuple
    longest_increasing_run: int

    def to_json(self) -> dict:
        return {
            "invariant": self.recipe.invariant,
            "rows": [r.to_json() for r in self.rows],
            "distinct_values": [str(v) for v in self.distinct],
            "longest_increasing_run": self.longest_increasing_run,
        }

    def table(self) -> tuple:
        names = sorted(self.recipe.params)
        header = names + ["status", "value", "witnesses", "error"]
        timed = any(r.seconds is not None for r in self.rows)
        if timed:
            header.append("seconds")
        body = []
        for r in self.rows:
            row = [str(r.params[k]) for k in names]
            row += [r.status, "" if r.value is None else str(_render(r.value)),
                    ";".join("(" + ",".join(str(x) for x in w) + ")" for w in r.witnesses),
                    r.error or ""]
            if timed:
                row.append("" if r.seconds is None else f"{r.seconds:.6f}")
            body.append(row)
        return header, body


def _auxiliary(recipe: ScanRecipe, params: dict) -> RIdeal:
    if recipe.auxiliary is None:
        return RIdeal.single(invariant_maximal_ideal(recipe.germ), 1)
    return instantiate_rideal(recipe.auxiliary, params, recipe.germ.dim)


def evaluate_row(recipe: ScanRecipe, params: dict, timing: bool = False) -> ScanRow:
    """Compute one row; engine errors are captured, not raised."""
    start = time.perf_counter()
    try:
        a = instantiate_rideal(recipe.family, params, recipe.germ.dim)
        pair = PairSpec(recipe.germ, a)
        inv = recipe.invariant
        if inv == "mld":
            rep = mld_at_stratum(pair, recipe.stratum, recipe.config)
            row = ScanRow(params, rep.status, rep.value, rep.witnesses)
        elif inv == "lct":
            t = lct(pair, _auxiliary(recipe, params))
            row = ScanRow(params, "value", t if t != INF else "inf")
        elif inv == "alct":
            t = alc_threshold(pair, _auxiliary(recipe, params), recipe.target, recipe.config)
            row = ScanRow(params, "value" if t is not None else "unreachable", t)
        else:
            res = (is_semistable_type if inv == "semistable" else is_special)(pair, recipe.config)
            status = "value" if res.value is not None else "uncertified"
            row = ScanRow(params, status, res.value, tuple(res.witnesses))
    except Exception as exc:  # per-row capture keeps long sweeps alive
        row = ScanRow(params, "error", error=f"{type(exc).__name__}: {exc}")
    if timing:
        row = ScanRow(row.params, row.status, row.value, row.witnesses, row.error, time.perf_counter() - start)
    return row


def _worker(job):
    recipe, params, timing = job
    return evaluate_row(recipe, params, timing)


def longest_increasing_run(values: list) -> int:
    """Length of the longest contiguous strictly increasing stretch."""
    best = run = 0
    prev = None
    for v in values:
        run = run + 1 if prev is not None and v > prev else 1
        best = max(best, run)
        prev = v
    return best


def run_scan(recipe: ScanRecipe, jobs: int = 1, timing: bool = False) -> ScanResult:
    tuples = recipe.tuples()
    work = [(recipe, p, timing) for p in tuples]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_worker, work))  # map restores submission order
    else:
        rows = [_worker(j) for j in work]
    numeric = [r.value for r in rows if r.status == "value" and isinstance(r.value, Fraction)]
    return ScanResult(recipe, tuple(rows), tuple(sorted(set(numeric))), longest_increasing_run(numeric))
