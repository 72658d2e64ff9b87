"""Command-line front end."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional

from .blowup import (
    BlowUpSpec,
    CompositionError,
    CompositionProblem,
    charts,
    classify_contraction,
    compose_blowups,
    weak_transform,
)
from .germ import CyclicQuotientGerm
from .golden import verify_golden_examples
from .ideals import MonomialIdeal, RIdeal, invariant_maximal_ideal
from .mld import (
    EngineRefusal,
    MldConfig,
    PairSpec,
    alc_threshold,
    brute_force_mld,
    classify_pair,
    is_semistable_type,
    is_special,
    lc_centres,
    lct_report,
    mld_at_stratum,
)
from .numeric import DimensionError, as_rational
from .polyhedra import CertificateError, audit_outcomes
from .scan import ScanRecipe, run_scan
from .slopes import SlopePair, detect_lc_slope, enumerate_Pn, mediant_combine, reduce_slope
from .valuations import DEFAULT_ORDER_CAP, OrderBoundExceeded

EXIT_OK, EXIT_INPUT, EXIT_REFUSAL, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(ValueError):
    pass


class Refusal(Exception):
    """Raised after output is written when certification was demanded but not obtained."""


# input helpers ------------------------------------------------------------------


def load_json(arg: str):
    """Parse inline JSON, ``-`` for stdin, or a file path."""
    text = arg.strip()
    try:
        if text.startswith(("{", "[")):
            return json.loads(text)
        if text == "-":
            return json.load(sys.stdin)
        with open(arg, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {arg}: {exc}") from exc


def parse_ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def parse_rationals(text: str) -> tuple:
    return tuple(as_rational(x.strip()) for x in text.split(","))


def _pair(args) -> PairSpec:
    data = load_json(args.pair)
    if "germ" not in data:
        data = {"germ": {"dim": data.get("dim", 3)}, "rideal": data}
    return PairSpec.from_json(data)


def _germ(arg: Optional[str], dim: int = 3) -> CyclicQuotientGerm:
    return CyclicQuotientGerm.smooth(dim) if arg is None else CyclicQuotientGerm.from_json(load_json(arg))


def _aux(args, pair: PairSpec) -> RIdeal:
    if args.aux is None:
        return RIdeal.single(invariant_maximal_ideal(pair.germ), 1)
    return RIdeal.from_json(load_json(args.aux), dim=pair.dim)


def _config(args) -> MldConfig:
    return MldConfig(bound=args.bound or 12, certify=args.certify)


def _demand(args, certified: bool) -> None:
    if args.certify and not certified:
        raise Refusal("result is not certified")


# commands -----------------------------------------------------------------------


def cmd_mld(args):
    pair = _pair(args)
    stratum = None if args.stratum is None else tuple(i - 1 for i in parse_ints(args.stratum))
    rep = mld_at_stratum(pair, stratum, _config(args))
    return rep.to_json(), None, rep.certified


def cmd_lct(args):
    pair = _pair(args)
    return lct_report(pair, _aux(args, pair)).to_json(), None, True


def cmd_alct(args):
    pair = _pair(args)
    t = alc_threshold(pair, _aux(args, pair), as_rational(args.target), _config(args))
    return {"target": str(as_rational(args.target)), "value": None if t is None else str(t)}, None, True


def cmd_lc_centres(args):
    rep = lc_centres(_pair(args), _config(args))
    certified = all(r.certified for _, r in rep.strata)
    return rep.to_json(), None, certified


def cmd_classify(args):
    c = classify_pair(_pair(args), _config(args))
    return c.to_json(), None, c.certified


def cmd_semistable(args):
    res = is_semistable_type(_pair(args), _config(args))
    return res.to_json(), None, res.value is not None


def cmd_special(args):
    res = is_special(_pair(args), _config(args))
    return res.to_json(), None, res.value is not None


def cmd_oracle(args):
    pair = _pair(args)
    stratum = None if args.stratum is None else tuple(i - 1 for i in parse_ints(args.stratum))
    rep = brute_force_mld(pair, stratum, args.bound or 12)
    return rep.to_json(), None, True


def _spec(args) -> BlowUpSpec:
    germ = _germ(args.germ)
    return BlowUpSpec(germ, parse_rationals(args.weights))


def cmd_wbu_charts(args):
    atlas = charts(_spec(args))
    rows = (["chart", "type", "smooth"],
            [[str(c.index + 1), c.germ.normalized().label(), str(c.smooth).lower()] for c in atlas.charts])
    return atlas.to_json(), rows, True


def cmd_wbu_transform(args):
    spec = _spec(args)
    data = load_json(args.ideal)
    if "components" in data:
        a = RIdeal.from_json(data, dim=spec.germ.dim)
    else:
        a = MonomialIdeal.from_json({"dim": spec.germ.dim, **data})
    out = weak_transform(a, spec, args.chart - 1, q_mode=args.q_mode)
    return {"chart": args.chart, "transform": out.to_json()}, None, True


def cmd_wbu_compose(args):
    data = load_json(args.problem)
    cap = args.order_cap or DEFAULT_ORDER_CAP
    prob = CompositionProblem.from_json(data, assume_aprime=args.assume_aprime, order_cap=cap)
    return compose_blowups(prob).to_json(), None, True


def cmd_contraction(args):
    germ = _germ(args.germ)
    cand = None if args.weights is None else parse_ints(args.weights)
    return classify_contraction(germ, cand).to_json(), None, True


def cmd_slope_pn(args):
    pairs = enumerate_Pn(args.n)
    payload = {"n": args.n, "pairs": [list(p.as_tuple()) for p in pairs], "slopes": [str(p.slope) for p in pairs]}
    rows = (["w1", "w2", "slope"], [[str(p.w1), str(p.w2), str(p.slope)] for p in pairs])
    return payload, rows, True


def _slope_pair(text: str) -> SlopePair:
    w = parse_ints(text)
    if len(w) != 2:
        raise InputError("a slope pair has two entries")
    return SlopePair(*w)


def cmd_slope_reduce(args):
    p = _slope_pair(args.pair)
    q = reduce_slope(p, args.n)
    return {"pair": list(p.as_tuple()), "n": args.n, "reduced": list(q.as_tuple()),
            "determinant": p.w1 * q.w2 - p.w2 * q.w1}, None, True


def cmd_slope_detect(args):
    p = _slope_pair(args.pair)
    a = RIdeal.from_json(load_json(args.ideal), dim=3)
    return {"pair": list(p.as_tuple()), "lc_slope": detect_lc_slope(a, p)}, None, True


def cmd_slope_mediant(args):
    p1, p2 = _slope_pair(args.p1), _slope_pair(args.p2)
    c = parse_rationals(args.coeffs)
    if len(c) != 2:
        raise InputError("--coeffs takes two values")
    q = mediant_combine(p1, p2, *c)
    return {"p1": list(p1.as_tuple()), "p2": list(p2.as_tuple()), "coeffs": [str(x) for x in c],
            "combined": list(q.as_tuple())}, None, True


def cmd_scan(args):
    data = load_json(args.recipe)
    recipe = ScanRecipe.from_json(data)
    if args.bound or not args.certify:
        recipe = ScanRecipe(recipe.family, recipe.params, recipe.invariant, recipe.germ, recipe.auxiliary,
                            recipe.target, recipe.stratum,
                            MldConfig(bound=args.bound or recipe.config.bound, certify=args.certify,
                                      max_bound=recipe.config.max_bound))
    result = run_scan(recipe, jobs=args.jobs, timing=args.timing)
    payload = result.to_json()
    if args.figure:
        from .plotting import plot_scan

        plot_scan(result, args.figure)
        payload["figure"] = args.figure
    return payload, result.table(), True


def cmd_verify_golden(args):
    items = verify_golden_examples()
    payload = {"items": [i.to_json() for i in items], "passed": sum(i.passed for i in items),
               "total": len(items)}
    rows = (["name", "passed", "detail"], [[i.name, "PASS" if i.passed else "FAIL", i.detail] for i in items])
    if not all(i.passed for i in items):
        return payload, rows, "failed"
    return payload, rows, True


# output -------------------------------------------------------------------------


def _flatten(obj, prefix: str = "") -> list:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        return [(prefix, json.dumps(obj, sort_keys=True, separators=(",", ":")))]
    if isinstance(obj, list):
        return [(prefix, json.dumps(obj, separators=(",", ":")))]
    if obj is None:
        return [(prefix, "")]
    if isinstance(obj, bool):
        return [(prefix, str(obj).lower())]
    return [(prefix, str(obj))]


def render(payload, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    header, body = rows if rows is not None else (["key", "value"], [list(kv) for kv in _flatten(payload)])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    widths = [max([len(h)] + [len(r[i]) for r in body]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(widths[i]) for i, c in enumerate(r)).rstrip() for r in body]
    return "\n".join(lines) + "\n"


# parser -------------------------------------------------------------------------


def _default_jobs() -> int:
    raw = os.environ.get("MLDLAB_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("json", "csv", "table"), default=d("json"))
    p.add_argument("--bound", type=int, default=d(None), help="lattice enumeration bound")
    p.add_argument("--certify", action=argparse.BooleanOptionalAction, default=d(True),
                   help="demand certified results (exit 2 otherwise)")
    p.add_argument("--order-cap", type=int, default=d(None), help="truncation cap for composed orders")
    p.add_argument("--jobs", type=int, default=d(_default_jobs()), help="worker processes (env MLDLAB_JOBS)")
    p.add_argument("--dump-lp", metavar="PATH", default=d(None), help="write every solved LP and certificate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mldlab", description="Exact minimal log discrepancies of monomial pairs")
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, helptext, parent=sub):
        p = parent.add_parser(name, parents=[common], help=helptext)
        p.set_defaults(func=func)
        return p

    def pair_cmd(name, func, helptext):
        p = add(name, func, helptext)
        p.add_argument("--pair", required=True, help="pair JSON (file, inline or -)")
        return p

    p = pair_cmd("mld", cmd_mld, "minimal log discrepancy")
    p.add_argument("--stratum", help="1-based coordinate indices, e.g. 1,2")
    p = pair_cmd("lct", cmd_lct, "log canonical threshold")
    p.add_argument("--aux", help="auxiliary R-ideal (default: maximal ideal)")
    p = pair_cmd("alct", cmd_alct, "threshold reaching a target mld")
    p.add_argument("--aux", help="auxiliary R-ideal (default: maximal ideal)")
    p.add_argument("--target", required=True, help="target value p/q")
    pair_cmd("lc-centres", cmd_lc_centres, "lc centres among torus-invariant strata")
    pair_cmd("classify", cmd_classify, "terminal / canonical / klt / lc classification")
    pair_cmd("semistable", cmd_semistable, "canonical of semistable type")
    pair_cmd("special", cmd_special, "lc with mld 1 and a one-dimensional smallest lc centre")

    oracle = sub.add_parser("oracle", help="brute-force oracles").add_subparsers(dest="oracle", required=True)
    p = add("mld", cmd_oracle, "brute-force mld by enumeration", oracle)
    p.add_argument("--pair", required=True)
    p.add_argument("--stratum")

    wbu = sub.add_parser("wbu", help="weighted blow-ups").add_subparsers(dest="wbu", required=True)
    p = add("charts", cmd_wbu_charts, "chart atlas", wbu)
    p.add_argument("--germ")
    p.add_argument("--weights", required=True, help="comma-separated weights, rationals allowed")
    p = add("transform", cmd_wbu_transform, "weak transform on one chart", wbu)
    p.add_argument("--germ")
    p.add_argument("--weights", required=True)
    p.add_argument("--ideal", required=True, help="monomial ideal or R-ideal JSON")
    p.add_argument("--chart", type=int, required=True, help="1-based chart index")
    p.add_argument("--q-mode", action="store_true", help="use the weak Q-transform")
    p = add("compose", cmd_wbu_compose, "compose two weighted blow-ups", wbu)
    p.add_argument("--problem", required=True)
    p.add_argument("--assume-aprime", action="store_true",
                   help="accept the unverified a'=1 step when no ideal is supplied")

    con = sub.add_parser("contraction", help="divisorial contractions").add_subparsers(dest="contraction",
                                                                                      required=True)
    p = add("classify", cmd_contraction, "classify a contraction to a germ", con)
    p.add_argument("--germ")
    p.add_argument("--weights", help="candidate (w1,w2) on a smooth germ")

    slope = sub.add_parser("slope", help="slope combinatorics").add_subparsers(dest="slope", required=True)
    p = add("pn", cmd_slope_pn, "enumerate P_n", slope)
    p.add_argument("--n", type=int, required=True)
    p = add("reduce", cmd_slope_reduce, "reduce a slope outside P_n", slope)
    p.add_argument("--pair", required=True)
    p.add_argument("--n", type=int, required=True)
    p = add("detect", cmd_slope_detect, "is the pair an lc slope", slope)
    p.add_argument("--pair", required=True)
    p.add_argument("--ideal", required=True)
    p = add("mediant", cmd_slope_mediant, "positive combination of two pairs", slope)
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--coeffs", default="1,1")

    p = add("scan", cmd_scan, "sweep an invariant over a parametric family")
    p.add_argument("--recipe", required=True)
    p.add_argument("--figure", metavar="PNG", help="also render the value column")
    p.add_argument("--timing", action="store_true", help="record per-row wall time")

    add("verify-paper", cmd_verify_golden, "run the golden example suite")
    return parser


def _dump(path: str, log: list) -> None:
    records = [{"lp": lp.to_json(), "outcome": out.to_json()} for lp, out in log]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(records, fh, sort_keys=True, indent=1)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        with audit_outcomes() as log:
            payload, rows, status = args.func(args)
        if args.dump_lp:
            _dump(args.dump_lp, log)
        sys.stdout.write(render(payload, rows, args.format))
        if status == "failed":
            return EXIT_INTERNAL
        _demand(args, status)
        return EXIT_OK
    except Refusal as exc:
        print(f"mldlab: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (EngineRefusal, OrderBoundExceeded) as exc:
        print(f"mldlab: engine refusal: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (CertificateError, CompositionError, AssertionError) as exc:
        print(f"mldlab: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, ValueError, DimensionError, KeyError) as exc:
        print(f"mldlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:
        print(f"mldlab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
