"""Structural verifier. Violations are returned as data, never raised."""

from __future__ import annotations

from dataclasses import dataclass

from irsmith.ir import Block, Module, Operation, func_name
from irsmith.registry import REGISTRY, Trait


@dataclass(frozen=True)
class Violation:
    kind: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.path}: {self.message}"


def verify_module(module: Module) -> list[Violation]:
    import irsmith.dialects  # noqa: F401  (registers op kinds)

    out: list[Violation] = []
    seen_ids: set[int] = set()
    signatures: dict[str, tuple[list, list]] = {}

    def report(kind: str, path: str, message: str) -> None:
        out.append(Violation(kind, path, message))

    def define(values, path: str) -> None:
        for v in values:
            if v.id in seen_ids:
                report("DuplicateValueId", path, f"value %{v.id} defined twice")
            seen_ids.add(v.id)

    def check_block(block: Block, path: str, scopes: list[set[int]], terminator: str | None) -> None:
        local: set[int] = {a.id for a in block.args}
        scopes = scopes + [local]
        last = len(block.ops) - 1
        for i, op in enumerate(block.ops):
            op_p = f"{path}/op[{i}]"
            check_op(op, op_p, scopes, local)
            spec = REGISTRY.specs.get(op.name)
            is_term = spec is not None and spec.has(Trait.IS_TERMINATOR)
            if is_term and (i != last or terminator is None):
                report("TerminatorMisplaced", op_p, f"{op.name} must end a region")
            elif is_term and op.name != terminator:
                report("WrongTerminator", op_p, f"expected {terminator}, found {op.name}")
            local.update(r.id for r in op.results)
        if terminator is not None:
            final = block.ops[-1] if block.ops else None
            if final is None or not (
                REGISTRY.specs.get(final.name) and REGISTRY.get(final.name).has(Trait.IS_TERMINATOR)
            ):
                report("MissingTerminator", path, f"block must end with {terminator}")

    def check_op(op: Operation, path: str, scopes: list[set[int]], local: set[int]) -> None:
        spec = REGISTRY.specs.get(op.name)
        if spec is None:
            report("UnknownOp", path, f"unregistered op {op.name}")
            return
        # operand visibility: enclosing scopes up to the isolation boundary
        for j, v in enumerate(op.operands):
            if not any(v.id in s for s in scopes):
                report("UseBeforeDef", path, f"operand {j} (%{v.id}) is not defined before use")
        problems = []
        if spec.num_operands is not None and len(op.operands) != spec.num_operands:
            problems.append(f"expected {spec.num_operands} operands, got {len(op.operands)}")
        if spec.num_results is not None and len(op.results) != spec.num_results:
            problems.append(f"expected {spec.num_results} results, got {len(op.results)}")
        missing = [a for a in spec.required_attrs if a not in op.attributes]
        if missing:
            problems.append(f"missing attribute {missing[0]!r}")
        if len(op.regions) != len(spec.region_terminators):
            problems.append(f"expected {len(spec.region_terminators)} regions, got {len(op.regions)}")
        if problems:
            for msg in problems:
                report("BadSignature", path, msg)
            return
        if spec.check is not None:
            for msg in spec.check(op):
                report("BadSignature", path, msg)
        if op.name == "func.call":
            check_call(op, path)
        isolated = spec.has(Trait.ISOLATED_FROM_ABOVE)
        inner_scopes = [] if isolated else scopes
        for k, region in enumerate(op.regions):
            region_p = f"{path}/body" if op.name == "func.func" else f"{path}/region[{k}]"
            if len(region.blocks) != 1:
                report("BlockCount", region_p, f"expected 1 block, found {len(region.blocks)}")
                continue
            block = region.block
            define(block.args, region_p)
            check_block(block, region_p, inner_scopes, spec.region_terminators[k])
            term = block.ops[-1] if block.ops else None
            if term is not None and term.name == spec.region_terminators[k]:
                got = [v.type for v in term.operands]
                if got != region.declared_result_types:
                    report(
                        "TerminatorTypeMismatch",
                        region_p,
                        f"region declares ({', '.join(map(str, region.declared_result_types))})"
                        f" but {term.name} yields ({', '.join(map(str, got))})",
                    )
        define(op.results, path)

    def check_call(op: Operation, path: str) -> None:
        callee = op.attributes["callee"].name  # type: ignore[union-attr]
        sig = signatures.get(callee)
        if sig is None:
            report("UnknownCallee", path, f"call to undefined or later function @{callee}")
            return
        args, results = sig
        if [v.type for v in op.operands] != args or op.result_types != results:
            report("CallSignature", path, f"call does not match the signature of @{callee}")

    top = module.body.block
    names = []
    for i, f in enumerate(top.ops):
        if f.name != "func.func":
            report("TopLevel", f"op[{i}]", f"only func.func may appear at module level, found {f.name}")
            continue
        name = func_name(f)
        if name in names:
            report("DuplicateFunction", name, f"function @{name} defined twice")
        names.append(name)
        check_op(f, name, [], set())
        if f.regions and f.regions[0].blocks:
            body = f.regions[0]
            signatures[name] = ([a.type for a in body.block.args], list(body.declared_result_types))

    entry = module.function(module.entry)
    if entry is None:
        report("EntryMissing", module.entry, f"no function named {module.entry}")
    elif entry.regions and entry.regions[0].blocks:
        args = entry.regions[0].block.args
        if not args or any(not a.type.is_int for a in args):
            report("EntrySignature", module.entry, "entry needs at least one argument, all integers")
    return out
