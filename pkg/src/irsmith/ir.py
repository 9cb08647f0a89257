"""Operation model: typed SSA values, operations, single-block regions.

Everything here is plain data plus a few structural helpers (walk, clone,
structural equality). Op-kind knowledge (traits, signatures) lives in
:mod:`irsmith.registry`; checking lives in :mod:`irsmith.verify`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union


class TypeKind(enum.Enum):
    I1 = "i1"
    I32 = "i32"
    I64 = "i64"
    INDEX = "index"
    MEMREF = "memref"


_WIDTHS = {TypeKind.I1: 1, TypeKind.I32: 32, TypeKind.I64: 64, TypeKind.INDEX: 64}


@dataclass(frozen=True)
class Type:
    kind: TypeKind
    # Number of elements; only meaningful for memrefs (element type is i32).
    size: int = 0

    @property
    def is_int(self) -> bool:
        return self.kind is not TypeKind.MEMREF

    @property
    def width(self) -> int:
        return _WIDTHS[self.kind]

    def __str__(self) -> str:
        if self.kind is TypeKind.MEMREF:
            return f"memref<{self.size}xi32>"
        return self.kind.value


I1 = Type(TypeKind.I1)
I32 = Type(TypeKind.I32)
I64 = Type(TypeKind.I64)
INDEX = Type(TypeKind.INDEX)
INT_TYPES = (I1, I32, I64, INDEX)


def memref(size: int) -> Type:
    return Type(TypeKind.MEMREF, size)


def int_range(t: Type) -> tuple[int, int]:
    """Signed range of an integer type (i1 is treated as {0, 1})."""
    if t.kind is TypeKind.I1:
        return 0, 1
    w = t.width
    return -(1 << (w - 1)), (1 << (w - 1)) - 1


def wrap(value: int, t: Type) -> int:
    """Two's-complement wrap of ``value`` into ``t``; i1 normalizes to 0/1."""
    if t.kind is TypeKind.I1:
        return value & 1
    w = t.width
    value &= (1 << w) - 1
    if value >> (w - 1):
        value -= 1 << w
    return value


# --- attributes -------------------------------------------------------------

PREDICATES = ("eq", "ne", "slt", "sle", "sgt", "sge")


@dataclass(frozen=True)
class IntAttr:
    value: int
    type: Type


@dataclass(frozen=True)
class BoolAttr:
    value: bool


@dataclass(frozen=True)
class PredicateAttr:
    predicate: str


@dataclass(frozen=True)
class SymbolAttr:
    name: str


Attribute = Union[IntAttr, BoolAttr, PredicateAttr, SymbolAttr]


# --- values, ops, regions ---------------------------------------------------


class Value:
    """An SSA value: an op result or a block argument."""

    __slots__ = ("id", "type", "owner", "index")

    def __init__(self, id: int, type: Type, owner: Union[Operation, Block], index: int):
        self.id = id
        self.type = type
        self.owner = owner
        self.index = index

    @property
    def is_block_arg(self) -> bool:
        return isinstance(self.owner, Block)

    def __repr__(self) -> str:
        return f"%{self.id}:{self.type}"


class Operation:
    __slots__ = ("name", "operands", "attributes", "results", "regions", "parent")

    def __init__(
        self,
        name: str,
        operands: list[Value],
        attributes: dict[str, Attribute],
        results: list[Value],
        regions: list[Region],
    ):
        self.name = name
        self.operands = operands
        self.attributes = attributes
        self.results = results
        self.regions = regions
        self.parent: Optional[Block] = None
        for r in regions:
            r.parent = self

    @property
    def dialect(self) -> str:
        return self.name.split(".", 1)[0]

    @property
    def result_types(self) -> list[Type]:
        return [r.type for r in self.results]

    def __repr__(self) -> str:
        return f"<{self.name} {self.operands} -> {self.results}>"


class Block:
    __slots__ = ("id", "args", "ops", "parent")

    def __init__(self, id: int, args: Optional[list[Value]] = None):
        self.id = id
        self.args: list[Value] = args if args is not None else []
        self.ops: list[Operation] = []
        self.parent: Optional[Region] = None

    def append(self, op: Operation) -> None:
        op.parent = self
        self.ops.append(op)

    @property
    def terminator(self) -> Optional[Operation]:
        from irsmith.registry import is_terminator

        if self.ops and is_terminator(self.ops[-1]):
            return self.ops[-1]
        return None


class Region:
    __slots__ = ("blocks", "declared_result_types", "parent")

    def __init__(self, block: Block, declared_result_types: Optional[list[Type]] = None):
        self.blocks = [block]
        block.parent = self
        self.declared_result_types: list[Type] = list(declared_result_types or [])
        self.parent: Optional[Operation] = None

    @property
    def block(self) -> Block:
        return self.blocks[0]


class Module:
    """Top-level container; its body holds ``func.func`` definitions only."""

    def __init__(self, entry: str = "main"):
        self._ids = itertools.count()
        self._block_ids = itertools.count()
        self.body = Region(Block(next(self._block_ids)))
        self.entry = entry

    # id allocation -- ids are module-global and increase monotonically
    def new_value(self, type: Type, owner: Union[Operation, Block], index: int) -> Value:
        return Value(next(self._ids), type, owner, index)

    def new_block(self, arg_types: tuple[Type, ...] | list[Type] = ()) -> Block:
        block = Block(next(self._block_ids))
        block.args = [self.new_value(t, block, i) for i, t in enumerate(arg_types)]
        return block

    def new_op(
        self,
        name: str,
        operands: list[Value] | tuple[Value, ...] = (),
        result_types: list[Type] | tuple[Type, ...] = (),
        attributes: Optional[dict[str, Attribute]] = None,
        regions: list[Region] | tuple[Region, ...] = (),
    ) -> Operation:
        op = Operation(name, list(operands), dict(attributes or {}), [], list(regions))
        op.results = [self.new_value(t, op, i) for i, t in enumerate(result_types)]
        return op

    def bump_ids(self, at_least: int) -> None:
        """Make sure future ids are strictly greater than ``at_least``."""
        probe = next(self._ids)
        self._ids = itertools.count(max(probe, at_least + 1))

    @property
    def functions(self) -> list[Operation]:
        return list(self.body.block.ops)

    def function(self, name: str) -> Optional[Operation]:
        for f in self.body.block.ops:
            sym = f.attributes.get("sym_name")
            if isinstance(sym, SymbolAttr) and sym.name == name:
                return f
        return None


def func_name(op: Operation) -> str:
    sym = op.attributes.get("sym_name")
    return sym.name if isinstance(sym, SymbolAttr) else "?"


# --- traversal --------------------------------------------------------------


def iter_ops(block: Block) -> Iterator[Operation]:
    """Pre-order over every op in ``block`` including nested regions."""
    for op in block.ops:
        yield op
        for region in op.regions:
            for b in region.blocks:
                yield from iter_ops(b)


def walk(module: Module, visitor: Optional[Callable[[Operation], None]] = None) -> int:
    """Visit every operation in pre-order and return how many were visited."""
    n = 0
    for op in iter_ops(module.body.block):
        if visitor is not None:
            visitor(op)
        n += 1
    return n


def op_path(op: Operation) -> str:
    """Stable location string such as ``main/body/op[3]/region[0]/op[1]``."""
    parts: list[str] = []
    cur: Optional[Operation] = op
    while cur is not None:
        block = cur.parent
        if block is None:
            break
        region = block.parent
        owner = region.parent if region is not None else None
        if owner is None:
            # cur is a top-level function
            parts.append(func_name(cur))
            break
        parts.append(f"op[{block.ops.index(cur)}]")
        if owner.name == "func.func":
            parts.append("body")
        else:
            parts.append(f"region[{owner.regions.index(region)}]")
        cur = owner
    return "/".join(reversed(parts))


# --- cloning and structural equality ----------------------------------------


def clone_module(module: Module) -> Module:
    """Deep copy that preserves value ids."""
    out = Module(module.entry)
    vmap: dict[int, Value] = {}
    max_id = -1

    def copy_block(src: Block) -> Block:
        nonlocal max_id
        dst = Block(next(out._block_ids))
        for a in src.args:
            v = Value(a.id, a.type, dst, a.index)
            vmap[a.id] = v
            dst.args.append(v)
            max_id = max(max_id, a.id)
        for op in src.ops:
            dst.append(copy_op(op))
        return dst

    def copy_op(src: Operation) -> Operation:
        nonlocal max_id
        # operands may be forward references in malformed input; keep the
        # original object in that case so the verifier can still see it
        operands = [vmap.get(v.id, v) for v in src.operands]
        regions = [
            Region(copy_block(r.block), r.declared_result_types) for r in src.regions
        ]
        op = Operation(src.name, operands, dict(src.attributes), [], regions)
        for r in src.results:
            v = Value(r.id, r.type, op, r.index)
            vmap[r.id] = v
            op.results.append(v)
            max_id = max(max_id, r.id)
        return op

    for f in module.body.block.ops:
        out.body.block.append(copy_op(f))
    out.bump_ids(max_id)
    return out


def structural_equal(a: Module, b: Module) -> bool:
    """True iff the modules are isomorphic up to renaming of value ids."""
    if a.entry != b.entry:
        return False
    amap: dict[int, int] = {}
    bmap: dict[int, int] = {}

    def bind(x: Value, y: Value) -> bool:
        if x.type != y.type:
            return False
        if x.id in amap or y.id in bmap:
            return amap.get(x.id) == y.id and bmap.get(y.id) == x.id
        amap[x.id] = y.id
        bmap[y.id] = x.id
        return True

    def eq_block(x: Block, y: Block) -> bool:
        if len(x.args) != len(y.args) or len(x.ops) != len(y.ops):
            return False
        if not all(bind(p, q) for p, q in zip(x.args, y.args)):
            return False
        return all(eq_op(p, q) for p, q in zip(x.ops, y.ops))

    def eq_op(x: Operation, y: Operation) -> bool:
        if (
            x.name != y.name
            or x.attributes != y.attributes
            or len(x.operands) != len(y.operands)
            or len(x.results) != len(y.results)
            or len(x.regions) != len(y.regions)
        ):
            return False
        for p, q in zip(x.operands, y.operands):
            if p.type != q.type or amap.get(p.id) != q.id:
                return False
        for rx, ry in zip(x.regions, y.regions):
            if rx.declared_result_types != ry.declared_result_types:
                return False
            if len(rx.blocks) != len(ry.blocks):
                return False
            if not all(eq_block(p, q) for p, q in zip(rx.blocks, ry.blocks)):
                return False
        return all(bind(p, q) for p, q in zip(x.results, y.results))

    return eq_block(a.body.block, b.body.block)
