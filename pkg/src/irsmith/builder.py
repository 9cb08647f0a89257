"""IR builder and the selection-pool generation loop.

The builder owns one module under construction, a stack of open scopes (one
per region being filled) and the RNG. Insertion always happens at the end of
the innermost open block, so the insertion point can only move forward or
down into a new region, never back up.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from irsmith.config import GenConfig
from irsmith.ir import Attribute, Block, Module, Operation, Region, Type, Value
from irsmith.registry import REGISTRY, OpKindSpec, Registry, Trait
from irsmith.rng import SplitMix64

# Upper bound on the product of enclosing for-loop trip counts (calls
# included), which keeps the dynamic cost of loop-only code bounded.
WORK_CAP = 1024

Listener = Callable[[str, str], None]


class GenerationError(RuntimeError):
    """The framework produced a module that fails verification."""


@dataclass
class Scope:
    block: Block
    isolated: bool


@dataclass(frozen=True)
class Snapshot:
    ops_created: int
    freed: frozenset[int]
    block_lens: tuple[int, ...]


class Builder:
    def __init__(
        self,
        config: GenConfig,
        registry: Registry = REGISTRY,
        listener: Optional[Listener] = None,
        record_trace: bool = False,
    ):
        self.config = config
        self.registry = registry
        self.rng = SplitMix64(config.seed)
        self.module = Module()
        self.listener = listener
        self.depth = 0
        self.ops_created = 0
        self.scopes: list[Scope] = [Scope(self.module.body.block, False)]
        # memrefs deallocated so far (generation-side tracking for safe mode)
        self.freed: frozenset[int] = frozenset()
        self.functions: list[Operation] = []
        self.function_work: dict[str, int] = {}
        self.trip_product = 1
        self.work = 1
        self.trace: Optional[list[tuple[int, int]]] = [] if record_trace else None
        self.pool_entries: list[tuple[OpKindSpec, float]] = [
            (spec, config.weight(spec.name))
            for spec in registry.poolable()
            if config.weight(spec.name) > 0
        ]

    # -- scope and value collection ------------------------------------------

    @property
    def block(self) -> Block:
        return self.scopes[-1].block

    def visible_values(self, type: Optional[Type] = None) -> list[Value]:
        """Values usable at the insertion point, innermost scope first.

        Within a scope the order is block arguments then op results in
        definition order. Collection stops after the first scope whose owner
        is isolated from above.
        """
        out: list[Value] = []
        for scope in reversed(self.scopes):
            blk = scope.block
            for v in blk.args:
                if type is None or v.type == type:
                    out.append(v)
            for op in blk.ops:
                for v in op.results:
                    if type is None or v.type == type:
                        out.append(v)
            if scope.isolated:
                break
        return out

    def sample_value(self, type: Type) -> Optional[Value]:
        vals = self.visible_values(type)
        if not vals:
            return None
        return vals[self.rng.below(len(vals))]

    def can_open_region(self) -> bool:
        return self.depth < self.config.max_region_depth

    def room(self, n: int = 1) -> bool:
        """True if ``n`` more ops fit both the module and the block budget."""
        return (
            self.ops_created + n <= self.config.max_total_ops
            and len(self.block.ops) + n <= self.config.max_ops_per_block
        )

    def new_block(self, arg_types: Sequence[Type] = ()) -> Block:
        return self.module.new_block(list(arg_types))

    @contextlib.contextmanager
    def region(self, block: Block, isolated: bool = False) -> Iterator[Block]:
        """Move the insertion point down into ``block`` for the duration."""
        self.scopes.append(Scope(block, isolated))
        self.depth += 1
        try:
            yield block
        finally:
            self.scopes.pop()
            self.depth -= 1

    # -- transactional state --------------------------------------------------

    def snapshot(self) -> Snapshot:
        return Snapshot(
            self.ops_created, self.freed, tuple(len(s.block.ops) for s in self.scopes)
        )

    def restore(self, snap: Snapshot) -> None:
        """Roll back to ``snap``; RNG draws made since are not replayed."""
        self.ops_created = snap.ops_created
        self.freed = snap.freed
        for scope, n in zip(self.scopes, snap.block_lens):
            del scope.block.ops[n:]

    def reserve(self) -> None:
        """Claim the budget slot of a region op before its regions are filled."""
        self.ops_created += 1

    # -- op creation ----------------------------------------------------------

    def check(self, op: Operation, spec: OpKindSpec) -> list[str]:
        problems: list[str] = []
        if spec.num_operands is not None and len(op.operands) != spec.num_operands:
            problems.append(f"expected {spec.num_operands} operands, got {len(op.operands)}")
        if spec.num_results is not None and len(op.results) != spec.num_results:
            problems.append(f"expected {spec.num_results} results, got {len(op.results)}")
        for attr in spec.required_attrs:
            if attr not in op.attributes:
                problems.append(f"missing attribute {attr!r}")
        if len(op.regions) != len(spec.region_terminators):
            problems.append(
                f"expected {len(spec.region_terminators)} regions, got {len(op.regions)}"
            )
        if not problems and spec.check is not None:
            problems.extend(spec.check(op))
        return problems

    def create(
        self,
        name: str,
        operands: Sequence[Value] = (),
        result_types: Sequence[Type] = (),
        attributes: Optional[dict[str, Attribute]] = None,
        regions: Sequence[Region] = (),
        reserved: bool = False,
    ) -> Optional[Operation]:
        """Build ``name`` detached, check it, and insert it on success.

        Returns None (and leaves the module untouched) when the op fails its
        constraints. An unregistered name raises UnknownOpError instead.
        """
        spec = self.registry.get(name)
        op = self.module.new_op(name, operands, result_types, attributes, regions)
        if self.check(op, spec):
            if reserved:
                self.ops_created -= 1
            return None
        block = self.block
        if self.trace is not None:
            self.trace.append((block.id, len(block.ops)))
        block.append(op)
        counted = not (
            spec.has(Trait.IS_TERMINATOR) or spec.top_level_only or reserved
        )
        if counted:
            self.ops_created += 1
        return op

    # -- generation loop ------------------------------------------------------

    def _emit(self, event: str, name: str) -> None:
        if self.listener is not None:
            self.listener(event, name)

    def fill_block(self, block: Optional[Block] = None) -> int:
        """Fill the current block from the selection pool; return ops added.

        An unsuccessful generator leaves the pool until the next success,
        which restores the full pool. After each success generation stops
        with probability ``p_stop``.
        """
        if block is not None and block is not self.block:
            raise ValueError("fill_block() must target the innermost open block")
        block = self.block
        cfg = self.config
        rng = self.rng
        start = len(block.ops)
        pool = list(self.pool_entries)
        while pool:
            if (
                len(block.ops) >= cfg.max_ops_per_block
                or self.ops_created >= cfg.max_total_ops
            ):
                break
            i = rng.weighted_index([w for _, w in pool])
            spec = pool[i][0]
            self._emit("chosen", spec.name)
            op = spec.gen(self)  # type: ignore[misc]
            if op is None:
                pool.pop(i)
                continue
            self._emit("generated", spec.name)
            pool = list(self.pool_entries)
            if rng.chance(cfg.p_stop):
                break
        return len(block.ops) - start


TopLevel = Callable[[Builder], None]


def generate_module(
    config: GenConfig,
    top_level: Optional[TopLevel] = None,
    listener: Optional[Listener] = None,
    registry: Registry = REGISTRY,
) -> Module:
    """Generate one verifier-clean module; identical configs give equal modules."""
    from irsmith.verify import verify_module

    if top_level is None:
        from irsmith.dialects.func import generate_functions

        top_level = generate_functions
    config.validate([s.name for s in registry.poolable()])
    builder = Builder(config, registry, listener)
    top_level(builder)
    problems = verify_module(builder.module)
    if problems:
        raise GenerationError(
            f"seed {config.seed}: generated module fails verification: {problems[0]}"
        )
    return builder.module
