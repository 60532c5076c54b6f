"""Stable multivariate polynomials: semidecision of stability, interlacing checks and certified constructions."""

from .construct import PencilSpec, bezout, det_pencil, hadamard, random_stable, wronskian
from .factcheck import REGISTRY, SuiteReport, probe_question, run_suite
from .interlace import Relation, RelationVerdict, check_relation, hermite_biehler_check, ratio_region_check
from .polycore import MultiPoly, UniPoly, format_text, parse_text
from .stability import ProbablyStable, SamplerConfig, StableByCertificate, Unstable, decide, decide_upper, in_ppos

__all__ = [
    "MultiPoly", "UniPoly", "parse_text", "format_text",
    "SamplerConfig", "Unstable", "ProbablyStable", "StableByCertificate", "decide", "decide_upper", "in_ppos",
    "Relation", "RelationVerdict", "check_relation", "hermite_biehler_check", "ratio_region_check",
    "PencilSpec", "det_pencil", "bezout", "wronskian", "hadamard", "random_stable",
    "REGISTRY", "SuiteReport", "run_suite", "probe_question",
]
