"""func: function definitions, calls and returns."""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

from irsmith.dialects.scf import sample_yield_values
from irsmith.dialects.types import sample_arg_type
from irsmith.ir import Operation, Region, SymbolAttr
from irsmith.registry import REGISTRY, OpKindSpec, Trait

if TYPE_CHECKING:
    from irsmith.builder import Builder

MAX_ARGS = 3


def function_signature(f: Operation) -> tuple[list, list]:
    body = f.regions[0]
    return [a.type for a in body.block.args], list(body.declared_result_types)


def gen_function(b: Builder, name: str, is_main: bool = False) -> Optional[Operation]:
    """Define one function at module level.

    The body's result types are unknown until the return is generated, so the
    return generator fixes them after the body has been filled.
    """
    if len(b.scopes) != 1 or len(b.functions) >= b.config.max_functions:
        return None
    rng = b.rng
    nargs = rng.randint(1 if is_main else 0, MAX_ARGS)
    body = b.new_block([sample_arg_type(b) for _ in range(nargs)])
    b.work = 1
    b.trip_product = 1
    with b.region(body, isolated=True):
        b.fill_block()
        returned = sample_yield_values(b)
        b.create("func.return", returned)
    types = [v.type for v in returned]
    op = b.create(
        "func.func",
        attributes={"sym_name": SymbolAttr(name)},
        regions=(Region(body, types),),
    )
    if op is not None:
        b.functions.append(op)
        b.function_work[name] = b.work
    return op


def generate_functions(b: Builder) -> None:
    """Top-level piece: 1..max_functions functions, the last one is ``main``."""
    n = b.rng.randint(1, b.config.max_functions)
    for i in range(n):
        last = i == n - 1
        gen_function(b, "main" if last else f"f{i}", is_main=last)


def gen_call(b: Builder) -> Optional[Operation]:
    from irsmith.builder import WORK_CAP

    if not b.room(1) or not b.functions:
        return None
    callees = []
    for f in b.functions:
        name = f.attributes["sym_name"].name  # type: ignore[union-attr]
        if b.trip_product * b.function_work.get(name, 1) > WORK_CAP:
            continue
        arg_types, _ = function_signature(f)
        if all(b.visible_values(t) for t in set(arg_types)):
            callees.append(f)
    if not callees:
        return None
    f = b.rng.choice(callees)
    name = f.attributes["sym_name"].name  # type: ignore[union-attr]
    arg_types, result_types = function_signature(f)
    args = [b.sample_value(t) for t in arg_types]
    op = b.create("func.call", args, result_types, {"callee": SymbolAttr(name)})  # type: ignore[arg-type]
    if op is not None:
        b.work = max(b.work, b.trip_product * b.function_work.get(name, 1))
    return op


def _check_func(op: Operation):
    if not isinstance(op.attributes["sym_name"], SymbolAttr):
        yield "sym_name must be a symbol"
    if any(not a.type.is_int for a in op.regions[0].block.args):
        yield "function arguments must be integers"


def _check_call(op: Operation):
    if not isinstance(op.attributes["callee"], SymbolAttr):
        yield "callee must be a symbol"


REGISTRY.register(
    OpKindSpec(
        "func.func",
        traits=frozenset({Trait.ISOLATED_FROM_ABOVE}),
        required_attrs=("sym_name",),
        region_terminators=("func.return",),
        check=_check_func,
        top_level_only=True,
        opens_regions=True,
    )
)
REGISTRY.register(
    OpKindSpec(
        "func.return",
        traits=frozenset({Trait.IS_TERMINATOR}),
        num_operands=None,
    )
)
REGISTRY.register(
    OpKindSpec(
        "func.call",
        traits=frozenset({Trait.HAS_SIDE_EFFECTS}),
        num_operands=None,
        num_results=None,
        required_attrs=("callee",),
        check=_check_call,
        gen=gen_call,
    )
)
