"""Validate BPMN 1.1 diagrams against a description-logic TBox under closed-world semantics."""
from functools import lru_cache
from importlib import resources

from .checker import ValidationReport, Violation, check_all, check_axiom, explain, extended_checks
from .classifier import Membership, StratumPlan, classify, eval_expr, stratify
from .graph import InstanceGraph, Individual, KindTable, apply_defaults, load_diagram, materialize_roles
from .ontology import TBox, parse_tbox, role_closure, well_formed

__version__ = "0.1.0"

BUNDLED_TBOX = "bpmn-1.1.tbox"


def bundled_tbox_text() -> bytes:
    return resources.files(__package__).joinpath("data", BUNDLED_TBOX).read_bytes()


@lru_cache(maxsize=1)
def bundled_tbox() -> TBox:
    """The BPMN 1.1 TBox shipped with the package (parsed once)."""
    return parse_tbox(bundled_tbox_text())


def validate(document, tbox: TBox = None, overrides=None, workers: int = 1) -> ValidationReport:
    """Load a diagram document and check it; the one-call entry point."""
    tbox = tbox or bundled_tbox()
    return check_all(tbox, load_diagram(document, tbox), overrides, workers)


__all__ = [
    "ValidationReport", "Violation", "check_all", "check_axiom", "explain", "extended_checks",
    "Membership", "StratumPlan", "classify", "eval_expr", "stratify",
    "InstanceGraph", "Individual", "KindTable", "apply_defaults", "load_diagram", "materialize_roles",
    "TBox", "parse_tbox", "role_closure", "well_formed", "bundled_tbox", "bundled_tbox_text", "validate",
]
