"""Belief functions from set-valued case data: conditioning, conditional approximation and propagation."""

from .cases import CaseRecord, CaseTable, bpa_from_cases, ingest_cases
from .conditionals import ApproximationResult, Strategy, approximate_conditional
from .config import DEFAULT_LIMITS, Limits
from .errors import EvidenceError
from .frames import FocalSet, JointFrame, Variable, box, build_frame
from .mass import MassFunction, combine, marginalize, vacuous_extend
from .network import EvidenceSet, EvidentialPolytree, propagate, reorient_for_target

__all__ = [
    "ApproximationResult",
    "CaseRecord",
    "CaseTable",
    "DEFAULT_LIMITS",
    "EvidenceError",
    "EvidenceSet",
    "EvidentialPolytree",
    "FocalSet",
    "JointFrame",
    "Limits",
    "MassFunction",
    "Strategy",
    "Variable",
    "approximate_conditional",
    "box",
    "bpa_from_cases",
    "build_frame",
    "combine",
    "ingest_cases",
    "marginalize",
    "propagate",
    "reorient_for_target",
    "vacuous_extend",
]
