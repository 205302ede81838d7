"""Controlled props for quantum circuits.

Terms of the vanilla (qc) and controllable (cqc) circuit languages, their
unitary semantics, rewrite rules with proof traces, the reduction to the
gate set G and the translations between the two languages.
"""

from .circuits import lambda_circuit, mu_circuit
from .diagram import (
    CNOT,
    H,
    Cnot,
    Ctrl,
    Diagram,
    Dialect,
    Hadamard,
    Id,
    Par,
    Phase,
    Seq,
    Swap,
    Z,
    dagger,
    flatten,
    replace_at,
    subterm_at,
    validate_dialect,
    wires,
)
from .errors import CtrlPropError
from .euler import EulerParams, apply_euler, euler_params
from .rules import ProofTrace, RuleInstance, builtin_rules, derived_rules, get_rule, soundness_check
from .semantics import equiv, interpret, max_abs_diff
from .structure import check_conjugation_condition, conjugate_control, in_fragment, layerize
from .syntax import diagram_hash, parse, to_text
from .translate import WitnessReport, completeness_pipeline, decode, encode, g_reduce

__version__ = "0.1.0"

__all__ = [
    "CNOT",
    "H",
    "Cnot",
    "Ctrl",
    "Diagram",
    "Dialect",
    "Hadamard",
    "Id",
    "Par",
    "Phase",
    "Seq",
    "Swap",
    "Z",
    "dagger",
    "flatten",
    "replace_at",
    "subterm_at",
    "validate_dialect",
    "wires",
    "CtrlPropError",
    "EulerParams",
    "apply_euler",
    "euler_params",
    "ProofTrace",
    "RuleInstance",
    "builtin_rules",
    "derived_rules",
    "get_rule",
    "soundness_check",
    "equiv",
    "interpret",
    "max_abs_diff",
    "check_conjugation_condition",
    "conjugate_control",
    "in_fragment",
    "layerize",
    "diagram_hash",
    "parse",
    "to_text",
    "WitnessReport",
    "completeness_pipeline",
    "decode",
    "encode",
    "g_reduce",
    "lambda_circuit",
    "mu_circuit",
]
