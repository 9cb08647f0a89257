"""mem: 1-D i32 buffers with alloc, load, store and dealloc.

In safe mode (the default) generated code never indexes out of bounds, never
touches a buffer after deallocating it and deallocates each buffer at most
once. ``allow_unsafe_memory`` drops all three guarantees.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Optional

from irsmith.dialects.arith import make_constant
from irsmith.dialects.types import sample_memref_type
from irsmith.ir import I32, INDEX, Operation, TypeKind, Value
from irsmith.registry import REGISTRY, OpKindSpec, Trait

if TYPE_CHECKING:
    from irsmith.builder import Builder

SIDE_EFFECTS = frozenset({Trait.HAS_SIDE_EFFECTS})


def _is_memref(v: Value) -> bool:
    return v.type.kind is TypeKind.MEMREF


def _live_buffers(b: Builder) -> list[Value]:
    bufs = [v for v in b.visible_values() if _is_memref(v)]
    if b.config.allow_unsafe_memory:
        return bufs
    return [v for v in bufs if v.id not in b.freed]


def _index(b: Builder, buf: Value) -> Optional[Operation]:
    size = buf.type.size
    hi = size + 1 if b.config.allow_unsafe_memory else size - 1
    return make_constant(b, INDEX, b.rng.randint(0, hi))


def gen_alloc(b: Builder) -> Optional[Operation]:
    if not b.room(1):
        return None
    return b.create("mem.alloc", (), (sample_memref_type(b),))


def gen_load(b: Builder) -> Optional[Operation]:
    bufs = _live_buffers(b)
    if not bufs or not b.room(2):
        return None
    buf = b.rng.choice(bufs)
    idx = _index(b, buf)
    assert idx is not None
    return b.create("mem.load", (buf, idx.results[0]), (I32,))


def gen_store(b: Builder) -> Optional[Operation]:
    bufs = _live_buffers(b)
    if not bufs or not b.room(2):
        return None
    value = b.sample_value(I32)
    if value is None:
        return None
    buf = b.rng.choice(bufs)
    idx = _index(b, buf)
    assert idx is not None
    return b.create("mem.store", (value, buf, idx.results[0]))


def gen_dealloc(b: Builder) -> Optional[Operation]:
    if not b.room(1):
        return None
    if b.config.allow_unsafe_memory:
        bufs = [v for v in b.visible_values() if _is_memref(v)]
    else:
        # only buffers defined in this very block: a dealloc inside a loop
        # body must not free an outer buffer once per iteration
        bufs = [
            r
            for op in b.block.ops
            for r in op.results
            if _is_memref(r) and r.id not in b.freed
        ]
    if not bufs:
        return None
    buf = b.rng.choice(bufs)
    op = b.create("mem.dealloc", (buf,))
    if op is not None:
        b.freed = b.freed | {buf.id}
    return op


def _check_alloc(op: Operation) -> Iterable[str]:
    t = op.results[0].type
    if t.kind is not TypeKind.MEMREF or t.size < 1:
        yield "mem.alloc must produce a memref with positive size"


def _check_access(buf: Value, idx: Value) -> Iterable[str]:
    if not _is_memref(buf):
        yield "expected a memref operand"
    if idx.type != INDEX:
        yield "index operand must be index"


def _check_load(op: Operation) -> Iterable[str]:
    yield from _check_access(*op.operands)
    if op.results[0].type != I32:
        yield "mem.load produces i32"


def _check_store(op: Operation) -> Iterable[str]:
    value, buf, idx = op.operands
    if value.type != I32:
        yield "mem.store stores an i32"
    yield from _check_access(buf, idx)


def _check_dealloc(op: Operation) -> Iterable[str]:
    if not _is_memref(op.operands[0]):
        yield "mem.dealloc expects a memref"


REGISTRY.register(
    OpKindSpec("mem.alloc", SIDE_EFFECTS, num_results=1, check=_check_alloc, gen=gen_alloc)
)
REGISTRY.register(
    OpKindSpec(
        "mem.load", SIDE_EFFECTS, num_operands=2, num_results=1, check=_check_load, gen=gen_load
    )
)
REGISTRY.register(
    OpKindSpec("mem.store", SIDE_EFFECTS, num_operands=3, check=_check_store, gen=gen_store)
)
REGISTRY.register(
    OpKindSpec("mem.dealloc", SIDE_EFFECTS, num_operands=1, check=_check_dealloc, gen=gen_dealloc)
)
