"""arith: integer constants, binary arithmetic, comparison and select."""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Optional

from irsmith.dialects.types import sample_int_type
from irsmith.ir import (
    I1,
    PREDICATES,
    BoolAttr,
    IntAttr,
    Operation,
    PredicateAttr,
    Type,
    TypeKind,
    Value,
    int_range,
)
from irsmith.registry import REGISTRY, OpKindSpec

if TYPE_CHECKING:
    from irsmith.builder import Builder

BINARY_OPS = ("addi", "subi", "muli", "andi", "ori", "xori", "divsi")


def is_arith_int(t: Type) -> bool:
    """Types accepted by the binary ops and cmpi (i1 is excluded)."""
    return t.kind in (TypeKind.I32, TypeKind.I64, TypeKind.INDEX)


def constant_value(v: Value) -> Optional[int]:
    """Integer value of ``v`` if it is produced by ``arith.constant``."""
    owner = v.owner
    if not isinstance(owner, Operation) or owner.name != "arith.constant":
        return None
    attr = owner.attributes.get("value")
    if isinstance(attr, IntAttr):
        return attr.value
    if isinstance(attr, BoolAttr):
        return int(attr.value)
    return None


# -- constraint checks ---------------------------------------------------------


def _check_constant(op: Operation) -> Iterable[str]:
    t = op.results[0].type
    attr = op.attributes["value"]
    if t == I1:
        if not isinstance(attr, BoolAttr):
            yield "i1 constant needs a boolean value"
    elif not t.is_int:
        yield f"constant of non-integer type {t}"
    elif not isinstance(attr, IntAttr) or attr.type != t:
        yield f"constant value does not match result type {t}"
    else:
        lo, hi = int_range(t)
        if not lo <= attr.value <= hi:
            yield f"constant {attr.value} does not fit {t}"


def _check_binary(op: Operation) -> Iterable[str]:
    a, b = op.operands
    if not is_arith_int(a.type):
        yield f"operand type {a.type} is not i32/i64/index"
    if a.type != b.type or op.results[0].type != a.type:
        yield "operand and result types must agree"


def _check_cmpi(op: Operation) -> Iterable[str]:
    a, b = op.operands
    pred = op.attributes["predicate"]
    if not isinstance(pred, PredicateAttr) or pred.predicate not in PREDICATES:
        yield "bad predicate"
    if not is_arith_int(a.type) or a.type != b.type:
        yield "cmpi operands must share an i32/i64/index type"
    if op.results[0].type != I1:
        yield "cmpi result must be i1"


def _check_select(op: Operation) -> Iterable[str]:
    c, a, b = op.operands
    if c.type != I1:
        yield "select condition must be i1"
    if not a.type.is_int or a.type != b.type or op.results[0].type != a.type:
        yield "select arms and result must share an integer type"


# -- generators ----------------------------------------------------------------


def make_constant(b: Builder, t: Type, value: int) -> Optional[Operation]:
    attr = BoolAttr(bool(value)) if t == I1 else IntAttr(value, t)
    return b.create("arith.constant", (), (t,), {"value": attr})


def sample_constant(b: Builder, t: Type) -> int:
    """Draw from the configured pool plus the type's min, max and one uniform value."""
    rng = b.rng
    if t == I1:
        return rng.below(2)
    lo, hi = int_range(t)
    pool = [v for v in b.config.int_constant_pool if lo <= v <= hi]
    k = rng.below(len(pool) + 3)
    if k < len(pool):
        return pool[k]
    k -= len(pool)
    if k == 0:
        return lo
    if k == 1:
        return hi
    return rng.randint(lo, hi)


def gen_constant(b: Builder) -> Optional[Operation]:
    if not b.room(1):
        return None
    t = sample_int_type(b)
    return make_constant(b, t, sample_constant(b, t))


def _int_values(b: Builder) -> list[Value]:
    return [v for v in b.visible_values() if is_arith_int(v.type)]


def _gen_binary(name: str):
    def gen(b: Builder) -> Optional[Operation]:
        if not b.room(1):
            return None
        candidates = _int_values(b)
        if not candidates:
            return None
        lhs = b.rng.choice(candidates)
        rhs = b.sample_value(lhs.type)
        return b.create(name, (lhs, rhs), (lhs.type,))

    gen.__name__ = "gen_" + name.split(".")[1]
    return gen


def gen_divsi(b: Builder) -> Optional[Operation]:
    # the divisor must be a nonzero constant so the program never divides by zero
    if not b.room(1):
        return None
    divisors = [
        v for v in _int_values(b) if constant_value(v) not in (None, 0)
    ]
    if not divisors:
        return None
    rhs = b.rng.choice(divisors)
    lhs = b.sample_value(rhs.type)
    return b.create("arith.divsi", (lhs, rhs), (rhs.type,))


def gen_cmpi(b: Builder) -> Optional[Operation]:
    if not b.room(1):
        return None
    candidates = _int_values(b)
    if not candidates:
        return None
    lhs = b.rng.choice(candidates)
    rhs = b.sample_value(lhs.type)
    pred = PredicateAttr(b.rng.choice(PREDICATES))
    return b.create("arith.cmpi", (lhs, rhs), (I1,), {"predicate": pred})


def gen_select(b: Builder) -> Optional[Operation]:
    if not b.room(1):
        return None
    cond = b.sample_value(I1)
    if cond is None:
        return None
    arms = [v for v in b.visible_values() if v.type.is_int]
    a = b.rng.choice(arms)  # cond itself is always an option
    other = b.sample_value(a.type)
    return b.create("arith.select", (cond, a, other), (a.type,))


REGISTRY.register(
    OpKindSpec(
        "arith.constant",
        num_results=1,
        required_attrs=("value",),
        check=_check_constant,
        gen=gen_constant,
    )
)
for _op in BINARY_OPS:
    REGISTRY.register(
        OpKindSpec(
            f"arith.{_op}",
            num_operands=2,
            num_results=1,
            check=_check_binary,
            gen=gen_divsi if _op == "divsi" else _gen_binary(f"arith.{_op}"),
        )
    )
REGISTRY.register(
    OpKindSpec(
        "arith.cmpi",
        num_operands=2,
        num_results=1,
        required_attrs=("predicate",),
        check=_check_cmpi,
        gen=gen_cmpi,
    )
)
REGISTRY.register(
    OpKindSpec(
        "arith.select",
        num_operands=3,
        num_results=1,
        check=_check_select,
        gen=gen_select,
    )
)
