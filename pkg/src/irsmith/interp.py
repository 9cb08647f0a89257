"""Reference interpreter with fuel and trap semantics.

A module is compiled once into nested Python closures and can then be run
on many argument vectors. Every executed op, terminators included, costs one
unit of fuel. Integer arithmetic wraps (two's complement); i1 is 0/1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from irsmith.ir import (
    BoolAttr,
    Block,
    IntAttr,
    Module,
    Operation,
    Type,
    TypeKind,
    func_name,
    int_range,
)

DEFAULT_FUEL = 100_000

TRAP_KINDS = ("div_by_zero", "oob", "use_after_free", "double_free")


@dataclass(frozen=True)
class Completed:
    values: tuple[int, ...]


@dataclass(frozen=True)
class Trap:
    kind: str
    message: str


@dataclass(frozen=True)
class FuelExhausted:
    ops_executed: int


RunOutcome = Union[Completed, Trap, FuelExhausted]


def describe(outcome: RunOutcome) -> str:
    if isinstance(outcome, Completed):
        return "Completed: " + ", ".join(str(v) for v in outcome.values)
    if isinstance(outcome, Trap):
        return f"Trap({outcome.kind}): {outcome.message}"
    return f"FuelExhausted: {outcome.ops_executed}"


class InterpreterError(Exception):
    """Caller error, e.g. arguments that do not match the entry signature."""


class _OutOfFuel(Exception):
    pass


class _Trapped(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


class Buffer:
    __slots__ = ("id", "data", "freed")

    def __init__(self, id: int, size: int):
        self.id = id
        self.data = [0] * size
        self.freed = False


def _wrapper(t: Type) -> Callable[[int], int]:
    if t.kind is TypeKind.I1:
        return lambda x: x & 1
    half = 1 << (t.width - 1)
    mask = (1 << t.width) - 1
    return lambda x: ((x + half) & mask) - half


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


_CMP: dict[str, Callable[[int, int], bool]] = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "slt": lambda a, b: a < b,
    "sle": lambda a, b: a <= b,
    "sgt": lambda a, b: a > b,
    "sge": lambda a, b: a >= b,
}

Env = dict
Step = Callable[[Env], None]


class _State:
    __slots__ = ("fuel", "next_buffer")

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.next_buffer = 0


class Interpreter:
    """Compiled form of a module; ``run`` may be called repeatedly."""

    def __init__(self, module: Module):
        self.module = module
        self.state = _State(0)
        self.functions: dict[str, tuple[list[int], Callable[[Env], list]]] = {}
        for f in module.body.block.ops:
            name = func_name(f)
            body = f.regions[0].block
            self.functions[name] = ([a.id for a in body.args], self._block(body, f"{name}/body"))
        self.signatures = {
            func_name(f): [a.type for a in f.regions[0].block.args]
            for f in module.body.block.ops
        }

    # -- compilation ----------------------------------------------------------

    def _block(self, block: Block, path: str) -> Callable[[Env], list]:
        """Compile a block; the returned runner yields the terminator's operands."""
        steps: list[Step] = []
        term_ids: list[int] = []
        for i, op in enumerate(block.ops):
            if i == len(block.ops) - 1 and op.name in ("scf.yield", "scf.condition", "func.return"):
                term_ids = [v.id for v in op.operands]
                continue
            steps.append(self._op(op, f"{path}/op[{i}]"))
        state = self.state
        has_term = bool(block.ops) and block.ops[-1].name in (
            "scf.yield", "scf.condition", "func.return")

        def run(env: Env) -> list:
            for step in steps:
                state.fuel -= 1
                if state.fuel < 0:
                    raise _OutOfFuel
                step(env)
            if has_term:
                state.fuel -= 1
                if state.fuel < 0:
                    raise _OutOfFuel
            return [env[i] for i in term_ids]

        return run

    def _op(self, op: Operation, path: str) -> Step:
        name = op.name
        ids = [v.id for v in op.operands]
        res = [r.id for r in op.results]

        if name == "arith.constant":
            attr = op.attributes["value"]
            value = int(attr.value) if isinstance(attr, BoolAttr) else attr.value  # type: ignore[union-attr]
            r = res[0]

            def constant(env: Env) -> None:
                env[r] = value

            return constant

        if name in ("arith.addi", "arith.subi", "arith.muli"):
            w = _wrapper(op.results[0].type)
            a, b = ids
            r = res[0]
            if name == "arith.addi":
                def addi(env: Env) -> None:
                    env[r] = w(env[a] + env[b])
                return addi
            if name == "arith.subi":
                def subi(env: Env) -> None:
                    env[r] = w(env[a] - env[b])
                return subi

            def muli(env: Env) -> None:
                env[r] = w(env[a] * env[b])
            return muli

        if name in ("arith.andi", "arith.ori", "arith.xori"):
            a, b = ids
            r = res[0]
            # bitwise ops on in-range signed ints stay in range
            if name == "arith.andi":
                def andi(env: Env) -> None:
                    env[r] = env[a] & env[b]
                return andi
            if name == "arith.ori":
                def ori(env: Env) -> None:
                    env[r] = env[a] | env[b]
                return ori

            def xori(env: Env) -> None:
                env[r] = env[a] ^ env[b]
            return xori

        if name == "arith.divsi":
            w = _wrapper(op.results[0].type)
            a, b = ids
            r = res[0]

            def divsi(env: Env) -> None:
                d = env[b]
                if d == 0:
                    raise _Trapped("div_by_zero", f"div_by_zero at {path}: {env[a]} / 0")
                env[r] = w(_trunc_div(env[a], d))

            return divsi

        if name == "arith.cmpi":
            cmp = _CMP[op.attributes["predicate"].predicate]  # type: ignore[union-attr]
            a, b = ids
            r = res[0]

            def cmpi(env: Env) -> None:
                env[r] = 1 if cmp(env[a], env[b]) else 0

            return cmpi

        if name == "arith.select":
            c, a, b = ids
            r = res[0]

            def select(env: Env) -> None:
                env[r] = env[a] if env[c] else env[b]

            return select

        if name == "scf.if":
            then_run = self._block(op.regions[0].block, f"{path}/region[0]")
            else_run = self._block(op.regions[1].block, f"{path}/region[1]")
            c = ids[0]

            def scf_if(env: Env) -> None:
                out = then_run(env) if env[c] else else_run(env)
                for r, v in zip(res, out):
                    env[r] = v

            return scf_if

        if name == "scf.for":
            body = self._block(op.regions[0].block, f"{path}/region[0]")
            iv = op.regions[0].block.args[0].id
            lo, hi, st = ids

            def scf_for(env: Env) -> None:
                step = env[st]
                if step <= 0:
                    # malformed input only; generated loops have positive steps
                    while True:
                        env[iv] = env[lo]
                        body(env)
                for i in range(env[lo], env[hi], step):
                    env[iv] = i
                    body(env)

            return scf_for

        if name == "scf.while":
            before = self._block(op.regions[0].block, f"{path}/region[0]")
            after = self._block(op.regions[1].block, f"{path}/region[1]")

            def scf_while(env: Env) -> None:
                while before(env)[0]:
                    after(env)

            return scf_while

        if name == "func.call":
            callee = op.attributes["callee"].name  # type: ignore[union-attr]
            functions = self.functions

            def call(env: Env) -> None:
                arg_ids, run = functions[callee]
                vals = [env[a] for a in ids]
                for p, v in zip(arg_ids, vals):
                    env[p] = v
                out = run(env)
                for r, v in zip(res, out):
                    env[r] = v

            return call

        state = self.state
        if name == "mem.alloc":
            size = op.results[0].type.size
            r = res[0]

            def alloc(env: Env) -> None:
                env[r] = Buffer(state.next_buffer, size)
                state.next_buffer += 1

            return alloc

        if name in ("mem.load", "mem.store"):
            is_load = name == "mem.load"
            if is_load:
                m, ix = ids
            else:
                val, m, ix = ids
            verb = "load from" if is_load else "store to"

            def access(env: Env) -> None:
                buf: Buffer = env[m]
                i = env[ix]
                if buf.freed:
                    raise _Trapped(
                        "use_after_free",
                        f"use_after_free at {path}: {verb} buffer {buf.id} after dealloc",
                    )
                if not 0 <= i < len(buf.data):
                    raise _Trapped(
                        "oob",
                        f"oob at {path}: index {i} out of bounds for buffer {buf.id} of size {len(buf.data)}",
                    )
                if is_load:
                    env[res[0]] = buf.data[i]
                else:
                    buf.data[i] = env[val]

            return access

        if name == "mem.dealloc":
            m = ids[0]

            def dealloc(env: Env) -> None:
                buf: Buffer = env[m]
                if buf.freed:
                    raise _Trapped(
                        "double_free", f"double_free at {path}: buffer {buf.id} deallocated twice"
                    )
                buf.freed = True

            return dealloc

        raise InterpreterError(f"cannot interpret {name} at {path}")

    # -- execution ------------------------------------------------------------

    def run(
        self, args: Sequence[int], fuel: int = DEFAULT_FUEL, entry: Optional[str] = None
    ) -> RunOutcome:
        entry = entry or self.module.entry
        if entry not in self.functions:
            raise InterpreterError(f"no function named {entry}")
        types = self.signatures[entry]
        if len(args) != len(types):
            raise InterpreterError(f"{entry} takes {len(types)} arguments, got {len(args)}")
        for v, t in zip(args, types):
            lo, hi = int_range(t)
            if not lo <= v <= hi:
                raise InterpreterError(f"argument {v} does not fit {t}")
        if fuel < 1:
            raise InterpreterError("fuel must be positive")
        self.state.fuel = fuel
        self.state.next_buffer = 0
        arg_ids, body = self.functions[entry]
        env: Env = dict(zip(arg_ids, args))
        try:
            out = body(env)
        except _OutOfFuel:
            return FuelExhausted(fuel)
        except _Trapped as t:
            return Trap(t.kind, t.message)
        return Completed(tuple(v if isinstance(v, int) else -1 for v in out))


def interpret(
    module: Module, args: Sequence[int], fuel: int = DEFAULT_FUEL, entry: str = "main"
) -> RunOutcome:
    return Interpreter(module).run(args, fuel, entry)
