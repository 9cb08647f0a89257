"""Optimizer passes: constant folding, dead-code elimination and CSE.

Each pass is a pure module-to-module transform. Two deliberately unsound
behaviours can be switched on through :class:`BugInjection` so the
differential harness has something to find:

* B1: DCE deletes side-effect-free ``scf.while`` loops without a
  termination proof, turning non-terminating programs into terminating ones.
* B2: constant folding rewrites ``xori x, x`` to 1 instead of 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from irsmith.dialects.arith import constant_value
from irsmith.interp import _CMP, _trunc_div
from irsmith.ir import (
    I1,
    Block,
    BoolAttr,
    IntAttr,
    Module,
    Operation,
    Value,
    clone_module,
    iter_ops,
    structural_equal,
    wrap,
)
from irsmith.registry import REGISTRY, Trait


class PassId(enum.Enum):
    CONST_FOLD = "constfold"
    DCE = "dce"
    CSE = "cse"


DEFAULT_PIPELINE = (PassId.CONST_FOLD, PassId.CSE, PassId.DCE)
MAX_PIPELINE_ITERATIONS = 8


@dataclass(frozen=True)
class BugInjection:
    b1_dce_drops_infinite_loops: bool = False
    b2_xor_self_misfold: bool = False

    @classmethod
    def parse(cls, names: Iterable[str]) -> BugInjection:
        flags = {n.strip().lower() for n in names if n.strip()}
        unknown = flags - {"b1", "b2"}
        if unknown:
            raise ValueError(f"unknown injected bug {sorted(unknown)[0]!r} (known: b1, b2)")
        return cls("b1" in flags, "b2" in flags)

    def __str__(self) -> str:
        on = [n for n, f in (("b1", self.b1_dce_drops_infinite_loops), ("b2", self.b2_xor_self_misfold)) if f]
        return ",".join(on) or "none"


NO_BUGS = BugInjection()


def parse_passes(text: str) -> list[PassId]:
    return [PassId(p.strip().lower()) for p in text.split(",") if p.strip()]


# -- helpers -------------------------------------------------------------------


def _blocks(module: Module) -> list[Block]:
    out = []

    def visit(block: Block) -> None:
        out.append(block)
        for op in block.ops:
            for r in op.regions:
                visit(r.block)

    for f in module.body.block.ops:
        visit(f.regions[0].block)
    return out


def _replace_uses(module: Module, repl: dict[int, Value]) -> None:
    if not repl:
        return

    def resolve(v: Value) -> Value:
        while v.id in repl:
            v = repl[v.id]
        return v

    for op in iter_ops(module.body.block):
        op.operands = [resolve(v) for v in op.operands]


def _side_effects(op: Operation) -> bool:
    spec = REGISTRY.specs.get(op.name)
    return spec is None or spec.has(Trait.HAS_SIDE_EFFECTS)


def _may_trap(op: Operation) -> bool:
    return op.name == "arith.divsi" and constant_value(op.operands[1]) in (None, 0)


def _make_constant(op: Operation, value: int) -> None:
    """Turn ``op`` into an ``arith.constant`` in place, keeping its result."""
    t = op.results[0].type
    op.name = "arith.constant"
    op.operands = []
    op.regions = []
    op.attributes = {"value": BoolAttr(bool(value)) if t == I1 else IntAttr(value, t)}


# -- constant folding ----------------------------------------------------------

_BINARY = {
    "arith.addi": lambda a, b: a + b,
    "arith.subi": lambda a, b: a - b,
    "arith.muli": lambda a, b: a * b,
    "arith.andi": lambda a, b: a & b,
    "arith.ori": lambda a, b: a | b,
    "arith.xori": lambda a, b: a ^ b,
}


def _fold(op: Operation, inject: BugInjection, repl: dict[int, Value]) -> None:
    name = op.name
    if name == "arith.xori" and op.operands[0].id == op.operands[1].id:
        _make_constant(op, 1 if inject.b2_xor_self_misfold else 0)
        return
    if name == "arith.select":
        c = constant_value(op.operands[0])
        if c is not None:
            repl[op.results[0].id] = op.operands[1] if c else op.operands[2]
        return
    consts = [constant_value(v) for v in op.operands]
    if not op.operands or any(c is None for c in consts):
        return
    t = op.results[0].type
    if name in _BINARY:
        _make_constant(op, wrap(_BINARY[name](*consts), t))
    elif name == "arith.divsi" and consts[1] != 0:
        _make_constant(op, wrap(_trunc_div(consts[0], consts[1]), t))
    elif name == "arith.cmpi":
        pred = op.attributes["predicate"].predicate  # type: ignore[union-attr]
        _make_constant(op, int(_CMP[pred](consts[0], consts[1])))


def constant_fold(module: Module, inject: BugInjection = NO_BUGS) -> Module:
    m = clone_module(module)
    repl: dict[int, Value] = {}
    for op in iter_ops(m.body.block):
        if op.name.startswith("arith.") and op.name != "arith.constant":
            _fold(op, inject, repl)
    _replace_uses(m, repl)
    return m


# -- dead-code elimination -----------------------------------------------------


def _pure_tree(op: Operation, inject: BugInjection) -> bool:
    """No side effects, no trap and guaranteed termination, nested ops included."""
    if _side_effects(op) or _may_trap(op):
        return False
    if op.name == "scf.while" and not inject.b1_dce_drops_infinite_loops:
        return False
    return all(_pure_tree(inner, inject) for r in op.regions for inner in r.block.ops)


def _removable(op: Operation, inject: BugInjection) -> bool:
    spec = REGISTRY.specs.get(op.name)
    if spec is None or spec.has(Trait.IS_TERMINATOR) or op.name == "func.func":
        return False
    if op.name == "scf.while" and not (
        spec.has(Trait.ALWAYS_TERMINATES) or inject.b1_dce_drops_infinite_loops
    ):
        return False
    return _pure_tree(op, inject)


def dead_code_elimination(module: Module, inject: BugInjection = NO_BUGS) -> Module:
    m = clone_module(module)
    uses: dict[int, int] = {}
    for op in iter_ops(m.body.block):
        for v in op.operands:
            uses[v.id] = uses.get(v.id, 0) + 1

    def drop(op: Operation) -> None:
        for inner in iter_ops_of(op):
            for v in inner.operands:
                uses[v.id] -= 1

    changed = True
    blocks = _blocks(m)
    while changed:
        changed = False
        for block in reversed(blocks):
            kept: list[Operation] = []
            for op in reversed(block.ops):
                if all(uses.get(r.id, 0) == 0 for r in op.results) and _removable(op, inject):
                    drop(op)
                    changed = True
                else:
                    kept.append(op)
            kept.reverse()
            block.ops = kept
        if changed:
            blocks = _blocks(m)
    return m


def iter_ops_of(op: Operation):
    yield op
    for r in op.regions:
        yield from iter_ops(r.block)


# -- common subexpression elimination ------------------------------------------


def common_subexpression_elimination(module: Module, inject: BugInjection = NO_BUGS) -> Module:
    m = clone_module(module)
    repl: dict[int, Value] = {}

    def resolve(v: Value) -> Value:
        while v.id in repl:
            v = repl[v.id]
        return v

    def visit(block: Block) -> None:
        seen: dict[tuple, Operation] = {}
        kept: list[Operation] = []
        for op in block.ops:
            op.operands = [resolve(v) for v in op.operands]
            if op.regions:
                for r in op.regions:
                    visit(r.block)
                kept.append(op)
                continue
            spec = REGISTRY.specs.get(op.name)
            if spec is None or _side_effects(op) or spec.has(Trait.IS_TERMINATOR) or not op.results:
                kept.append(op)
                continue
            key = (
                op.name,
                tuple(v.id for v in op.operands),
                tuple(sorted(op.attributes.items(), key=lambda kv: kv[0])),
                tuple(op.result_types),
            )
            first = seen.get(key)
            if first is None:
                seen[key] = op
                kept.append(op)
            else:
                for old, new in zip(op.results, first.results):
                    repl[old.id] = new
        block.ops = kept

    for f in m.body.block.ops:
        visit(f.regions[0].block)
    _replace_uses(m, repl)
    return m


# -- drivers -------------------------------------------------------------------

_PASSES = {
    PassId.CONST_FOLD: constant_fold,
    PassId.DCE: dead_code_elimination,
    PassId.CSE: common_subexpression_elimination,
}


def run_pass(module: Module, pass_id: PassId, inject: BugInjection = NO_BUGS) -> Module:
    return _PASSES[pass_id](module, inject)


@dataclass
class PipelineResult:
    module: Module
    iterations: int
    reached_fixpoint: bool


def run_pipeline(
    module: Module,
    passes: Sequence[PassId] = DEFAULT_PIPELINE,
    inject: BugInjection = NO_BUGS,
    max_iterations: int = MAX_PIPELINE_ITERATIONS,
) -> PipelineResult:
    """Apply ``passes`` in order, repeating until nothing changes."""
    current = module
    for i in range(1, max_iterations + 1):
        nxt = current
        for p in passes:
            nxt = run_pass(nxt, p, inject)
        if structural_equal(nxt, current):
            return PipelineResult(nxt, i, True)
        current = nxt
    return PipelineResult(current, max_iterations, False)
