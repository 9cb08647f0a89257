"""Differential testing: run a module before and after optimization and compare."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from irsmith.interp import (
    DEFAULT_FUEL,
    Completed,
    FuelExhausted,
    Interpreter,
    RunOutcome,
    Trap,
    describe,
)
from irsmith.ir import I1, Module, Type, int_range
from irsmith.passes import DEFAULT_PIPELINE, NO_BUGS, BugInjection, PassId, run_pipeline
from irsmith.rng import SplitMix64

ESCALATION_FACTOR = 10


class VerdictKind(enum.Enum):
    AGREE = "Agree"
    VALUE_MISMATCH = "ValueMismatch"
    TRAP_MISMATCH = "TrapMismatch"
    TERMINATION_SUSPECT = "TerminationSuspect"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    args: tuple[int, ...]
    original: RunOutcome
    optimized: RunOutcome
    escalated: bool = False

    @property
    def detail(self) -> str:
        """Human-readable reason; feeds bug grouping, so keep the format stable."""
        o, p = self.original, self.optimized
        if self.kind is VerdictKind.VALUE_MISMATCH:
            assert isinstance(o, Completed) and isinstance(p, Completed)
            return f"original returned ({_vals(o)}) but optimized returned ({_vals(p)})"
        if self.kind is VerdictKind.TRAP_MISMATCH:
            return f"original {_short(o)}; optimized {_short(p)}"
        if self.kind is VerdictKind.TERMINATION_SUSPECT:
            if isinstance(o, FuelExhausted):
                return f"original did not terminate within {o.ops_executed} ops; optimized {_short(p)}"
            assert isinstance(p, FuelExhausted)
            return f"optimized did not terminate within {p.ops_executed} ops; original {_short(o)}"
        return "outcomes agree"

    @property
    def message(self) -> str:
        return f"{self.kind.value}: {self.detail}"


def _vals(o: Completed) -> str:
    return ", ".join(str(v) for v in o.values)


def _short(o: RunOutcome) -> str:
    if isinstance(o, Completed):
        return "completed"
    if isinstance(o, Trap):
        return f"trapped with {o.message}"
    return f"ran out of fuel after {o.ops_executed} ops"


def classify(original: RunOutcome, optimized: RunOutcome) -> VerdictKind:
    """Verdict for a pair of outcomes before any fuel escalation."""
    if isinstance(original, Completed) and isinstance(optimized, Completed):
        return VerdictKind.AGREE if original.values == optimized.values else VerdictKind.VALUE_MISMATCH
    if isinstance(original, Trap) and isinstance(optimized, Trap):
        return VerdictKind.AGREE if original.kind == optimized.kind else VerdictKind.TRAP_MISMATCH
    if isinstance(original, FuelExhausted) and isinstance(optimized, FuelExhausted):
        return VerdictKind.AGREE
    if isinstance(original, FuelExhausted) or isinstance(optimized, FuelExhausted):
        return VerdictKind.TERMINATION_SUSPECT
    return VerdictKind.TRAP_MISMATCH


def compare(
    original: Interpreter,
    optimized: Interpreter,
    args: Sequence[int],
    fuel: int = DEFAULT_FUEL,
    escalation_factor: int = ESCALATION_FACTOR,
) -> Verdict:
    args = tuple(args)
    a = original.run(args, fuel)
    b = optimized.run(args, fuel)
    kind = classify(a, b)
    if kind is not VerdictKind.TERMINATION_SUSPECT:
        return Verdict(kind, args, a, b)
    # one side may just be slow: give it more fuel before judging
    if isinstance(a, FuelExhausted):
        a = original.run(args, fuel * escalation_factor)
    else:
        b = optimized.run(args, fuel * escalation_factor)
    kind = classify(a, b)
    return Verdict(kind, args, a, b, escalated=True)


def differential_check(
    module: Module,
    input_vectors: Sequence[Sequence[int]],
    passes: Sequence[PassId] = DEFAULT_PIPELINE,
    inject: BugInjection = NO_BUGS,
    fuel: int = DEFAULT_FUEL,
    escalation_factor: int = ESCALATION_FACTOR,
    optimized: Optional[Module] = None,
) -> list[Verdict]:
    """One verdict per input vector; pass ``optimized`` to skip re-optimizing."""
    if optimized is None:
        optimized = run_pipeline(module, passes, inject).module
    orig_i = Interpreter(module)
    opt_i = Interpreter(optimized)
    return [compare(orig_i, opt_i, args, fuel, escalation_factor) for args in input_vectors]


# -- input vectors -------------------------------------------------------------


def _sample_arg(rng: SplitMix64, t: Type) -> int:
    lo, hi = int_range(t)
    if t == I1:
        return rng.below(2)
    pool = (0, 1, -1, 2, lo, hi)
    k = rng.below(len(pool) + 1)
    return pool[k] if k < len(pool) else rng.randint(lo, hi)


def input_vectors(module: Module, seed: int, count: int = 4) -> list[tuple[int, ...]]:
    """The all-zeros vector followed by ``count - 1`` vectors drawn from ``seed``."""
    entry = module.function(module.entry)
    if entry is None:
        raise ValueError(f"module has no {module.entry} function")
    types = [a.type for a in entry.regions[0].block.args]
    rng = SplitMix64(seed ^ 0x5EED_1A9B_0000_0000)
    vectors = [tuple(0 for _ in types)]
    for _ in range(count - 1):
        vectors.append(tuple(_sample_arg(rng, t) for t in types))
    return vectors[:count]
