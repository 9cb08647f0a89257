"""Random program generation and differential fuzzing for a small SSA IR.

Importing the package registers the arith, scf, func and mem dialects.
"""

from irsmith import dialects  # noqa: F401  (populates the op registry)
from irsmith.builder import Builder, GenerationError, generate_module
from irsmith.config import GenConfig, dump_config, load_config
from irsmith.difftest import Verdict, VerdictKind, differential_check, input_vectors
from irsmith.interp import Completed, FuelExhausted, Interpreter, Trap, interpret
from irsmith.ir import Module, structural_equal, walk
from irsmith.passes import BugInjection, PassId, run_pass, run_pipeline
from irsmith.textio import ParseError, parse_module, print_module
from irsmith.verify import Violation, verify_module

__all__ = [
    "Builder",
    "BugInjection",
    "Completed",
    "FuelExhausted",
    "GenConfig",
    "GenerationError",
    "Interpreter",
    "Module",
    "ParseError",
    "PassId",
    "Trap",
    "Verdict",
    "VerdictKind",
    "Violation",
    "differential_check",
    "dump_config",
    "generate_module",
    "input_vectors",
    "interpret",
    "load_config",
    "parse_module",
    "print_module",
    "run_pass",
    "run_pipeline",
    "structural_equal",
    "verify_module",
    "walk",
]
