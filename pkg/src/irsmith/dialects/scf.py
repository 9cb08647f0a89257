"""scf: structured if / for / while with their yield and condition terminators."""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Optional

from irsmith.builder import WORK_CAP
from irsmith.dialects.arith import constant_value, make_constant
from irsmith.ir import I1, INDEX, Operation, Region, Value
from irsmith.registry import REGISTRY, OpKindSpec, Trait

if TYPE_CHECKING:
    from irsmith.builder import Builder

MAX_TRIP_COUNT = 1024
MAX_STEP = 4


def sample_yield_values(b: Builder) -> list[Value]:
    """Up to ``max_return_values`` visible non-memref values for a terminator."""
    choices = [v for v in b.visible_values() if v.type.is_int]
    k = b.rng.randint(0, b.config.max_return_values)
    if not choices:
        return []
    return [b.rng.choice(choices) for _ in range(k)]


# -- constraint checks ---------------------------------------------------------


def _check_region_results(op: Operation) -> Iterable[str]:
    types = op.result_types
    for i, region in enumerate(op.regions):
        if region.declared_result_types != types:
            yield f"region {i} declares {region.declared_result_types}, op yields {types}"


def _check_if(op: Operation) -> Iterable[str]:
    if op.operands[0].type != I1:
        yield "scf.if condition must be i1"
    yield from _check_region_results(op)


def _check_for(op: Operation) -> Iterable[str]:
    if any(v.type != INDEX for v in op.operands):
        yield "scf.for bounds must be index"
    step = constant_value(op.operands[2])
    if step is None or step <= 0:
        yield "scf.for step must be a positive constant"
    args = op.regions[0].block.args
    if len(args) != 1 or args[0].type != INDEX:
        yield "scf.for body takes exactly one index argument"


def _check_while(op: Operation) -> Iterable[str]:
    before, after = op.regions
    if before.declared_result_types != [I1]:
        yield "scf.while condition region must produce one i1"
    if after.declared_result_types:
        yield "scf.while body region must yield nothing"


def _check_condition(op: Operation) -> Iterable[str]:
    if op.operands[0].type != I1:
        yield "scf.condition operand must be i1"


# -- generators ----------------------------------------------------------------


def gen_if(b: Builder) -> Optional[Operation]:
    if not b.can_open_region() or not b.room(1):
        return None
    cond = b.sample_value(I1)
    if cond is None:
        return None
    snap = b.snapshot()
    b.reserve()
    then_block = b.new_block()
    with b.region(then_block):
        b.fill_block()
        yielded = sample_yield_values(b)
        then_yield = b.create("scf.yield", yielded)
    types = [v.type for v in yielded]
    else_block = b.new_block()
    with b.region(else_block):
        b.fill_block()
        matched = []
        for t in types:
            v = b.sample_value(t)
            if v is None:
                break
            matched.append(v)
        if len(matched) != len(types):
            # else-branch cannot match: drop the results on both sides
            types = []
            matched = []
            assert then_yield is not None
            then_yield.operands = []
        b.create("scf.yield", matched)
    op = b.create(
        "scf.if",
        (cond,),
        types,
        regions=(Region(then_block, types), Region(else_block, types)),
        reserved=True,
    )
    if op is None:
        b.restore(snap)
    return op


def gen_for(b: Builder) -> Optional[Operation]:
    # three bound constants plus the loop itself
    if not b.can_open_region() or not b.room(4):
        return None
    rng = b.rng
    hi = min(MAX_TRIP_COUNT, max(0, WORK_CAP // b.trip_product))
    lb = make_constant(b, INDEX, 0)
    ub = make_constant(b, INDEX, rng.randint(0, hi))
    step = make_constant(b, INDEX, rng.randint(1, MAX_STEP))
    assert lb is not None and ub is not None and step is not None
    trips = max(1, constant_value(ub.results[0]))  # type: ignore[arg-type]
    b.reserve()
    body = b.new_block((INDEX,))
    saved = b.trip_product
    b.trip_product = saved * trips
    b.work = max(b.work, b.trip_product)
    try:
        with b.region(body):
            b.fill_block()
            b.create("scf.yield")
    finally:
        b.trip_product = saved
    return b.create(
        "scf.for",
        (lb.results[0], ub.results[0], step.results[0]),
        regions=(Region(body),),
        reserved=True,
    )


def gen_while(b: Builder) -> Optional[Operation]:
    if not b.can_open_region() or not b.room(1):
        return None
    snap = b.snapshot()
    b.reserve()
    before = b.new_block()
    with b.region(before):
        b.fill_block()
        cond = b.sample_value(I1)
        if cond is not None:
            b.create("scf.condition", (cond,))
    if cond is None:
        # no boolean reachable from the condition region: give up entirely
        b.restore(snap)
        return None
    after = b.new_block()
    with b.region(after):
        b.fill_block()
        b.create("scf.yield")
    op = b.create(
        "scf.while",
        regions=(Region(before, [I1]), Region(after)),
        reserved=True,
    )
    if op is None:
        b.restore(snap)
    return op


REGISTRY.register(
    OpKindSpec(
        "scf.yield",
        traits=frozenset({Trait.IS_TERMINATOR}),
        num_operands=None,
    )
)
REGISTRY.register(
    OpKindSpec(
        "scf.condition",
        traits=frozenset({Trait.IS_TERMINATOR}),
        num_operands=1,
        check=_check_condition,
    )
)
REGISTRY.register(
    OpKindSpec(
        "scf.if",
        num_operands=1,
        num_results=None,
        region_terminators=("scf.yield", "scf.yield"),
        check=_check_if,
        gen=gen_if,
        opens_regions=True,
    )
)
REGISTRY.register(
    OpKindSpec(
        "scf.for",
        traits=frozenset({Trait.ALWAYS_TERMINATES}),
        num_operands=3,
        region_terminators=("scf.yield",),
        check=_check_for,
        gen=gen_for,
        opens_regions=True,
    )
)
REGISTRY.register(
    OpKindSpec(
        "scf.while",
        region_terminators=("scf.condition", "scf.yield"),
        check=_check_while,
        gen=gen_while,
        opens_regions=True,
    )
)
