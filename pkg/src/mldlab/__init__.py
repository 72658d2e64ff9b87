"""Exact minimal log discrepancies, weighted blow-ups and slope combinatorics on threefold germs."""

from __future__ import annotations

from .blowup import (
    BlowUpSpec,
    CompositionProblem,
    CompositionResult,
    charts,
    classify_contraction,
    compose_blowups,
    compose_hypothesis,
    parallel_check,
    weak_transform,
)
from .germ import CyclicQuotientGerm
from .ideals import (
    MonomialIdeal,
    PolyComponent,
    RIdeal,
    maximal_ideal,
    truncation_ideal,
    weighted_leading_part,
    weighted_order,
)
from .mld import (
    MldConfig,
    MldReport,
    PairSpec,
    alc_threshold,
    brute_force_mld,
    classify_pair,
    is_semistable_type,
    is_special,
    lc_centres,
    lct,
    mld,
    mld_at_stratum,
)
from .numeric import Polynomial
from .polyhedra import LinearProgram, LpOutcome, NewtonPolyhedron, audit_outcomes, solve_lp
from .slopes import SlopePair, detect_lc_slope, enumerate_Pn, mediant_combine, reduce_slope
from .valuations import ComposedValuation, ToricDivisor, composed_ord, log_discrepancy

__version__ = "0.1.0"

__all__ = [
    "BlowUpSpec",
    "ComposedValuation",
    "CompositionProblem",
    "CompositionResult",
    "CyclicQuotientGerm",
    "LinearProgram",
    "LpOutcome",
    "MldConfig",
    "MldReport",
    "MonomialIdeal",
    "NewtonPolyhedron",
    "PairSpec",
    "PolyComponent",
    "Polynomial",
    "RIdeal",
    "SlopePair",
    "ToricDivisor",
    "alc_threshold",
    "audit_outcomes",
    "brute_force_mld",
    "charts",
    "classify_contraction",
    "classify_pair",
    "compose_blowups",
    "compose_hypothesis",
    "composed_ord",
    "detect_lc_slope",
    "enumerate_Pn",
    "is_semistable_type",
    "is_special",
    "lc_centres",
    "lct",
    "log_discrepancy",
    "maximal_ideal",
    "mediant_combine",
    "mld",
    "mld_at_stratum",
    "parallel_check",
    "reduce_slope",
    "solve_lp",
    "truncation_ideal",
    "weak_transform",
    "weighted_leading_part",
    "weighted_order",
]
