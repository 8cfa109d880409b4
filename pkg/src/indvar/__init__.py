"""Exact computations and truncated certificates for affine ind-varieties."""

from .certificate import Certificate, Verdict, combine
from .dsl import DslError, format_spec, parse_spec
from .ideal import (
    GroebnerBasis,
    Ideal,
    ResourceError,
    StepLimitExceeded,
    eliminate,
    finiteness_test,
    ideal_membership,
    intersect,
    krull_dimension,
    normal_form,
    radical_membership,
    reduced_groebner,
    saturate,
    step_limit,
)
from .poly import GF, QQ, CurveRule, MonomialOrder, Polynomial, block, const, grevlex, lex, var
from .report import Report, emit_report, load_report, run_checks
from .tower import Component, GeneratorRule, Tower

__all__ = [
    "Certificate", "Verdict", "combine",
    "DslError", "format_spec", "parse_spec",
    "GroebnerBasis", "Ideal", "ResourceError", "StepLimitExceeded", "eliminate", "finiteness_test",
    "ideal_membership", "intersect", "krull_dimension", "normal_form", "radical_membership",
    "reduced_groebner", "saturate", "step_limit",
    "GF", "QQ", "CurveRule", "MonomialOrder", "Polynomial", "block", "const", "grevlex", "lex", "var",
    "Report", "emit_report", "load_report", "run_checks",
    "Component", "GeneratorRule", "Tower",
]
