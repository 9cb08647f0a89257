"""Op-kind registry: traits, signatures and generators, keyed by op name."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterable, Optional

if TYPE_CHECKING:
    from irsmith.builder import Builder
    from irsmith.ir import Operation


class Trait(enum.Enum):
    IS_TERMINATOR = "IsTerminator"
    ISOLATED_FROM_ABOVE = "IsolatedFromAbove"
    HAS_SIDE_EFFECTS = "HasSideEffects"
    ALWAYS_TERMINATES = "AlwaysTerminates"


Checker = Callable[["Operation"], Iterable[str]]
OpGen = Callable[["Builder"], Optional["Operation"]]


@dataclass
class OpKindSpec:
    name: str
    traits: frozenset[Trait] = frozenset()
    # expected operand/result counts; None means variadic
    num_operands: Optional[int] = 0
    num_results: Optional[int] = 0
    required_attrs: tuple[str, ...] = ()
    # one entry per region: name of the terminator that must end it
    region_terminators: tuple[str, ...] = ()
    check: Optional[Checker] = None
    gen: Optional[OpGen] = None
    # region-bearing gens refuse to run at the depth cap
    opens_regions: bool = False
    # only created by a parent op's generator, never from the selection pool
    top_level_only: bool = False

    def has(self, trait: Trait) -> bool:
        return trait in self.traits


class UnknownOpError(KeyError):
    """Raised for an op name that was never registered (a programming error)."""


@dataclass
class Registry:
    specs: dict[str, OpKindSpec] = field(default_factory=dict)

    def register(self, spec: OpKindSpec) -> OpKindSpec:
        if spec.name in self.specs:
            raise ValueError(f"op {spec.name!r} registered twice")
        self.specs[spec.name] = spec
        return spec

    def __contains__(self, name: str) -> bool:
        return name in self.specs

    def get(self, name: str) -> OpKindSpec:
        try:
            return self.specs[name]
        except KeyError:
            raise UnknownOpError(name) from None

    def poolable(self) -> list[OpKindSpec]:
        """Ops that may enter the selection pool, in registration order."""
        return [
            s
            for s in self.specs.values()
            if s.gen is not None
            and not s.has(Trait.IS_TERMINATOR)
            and not s.top_level_only
        ]


REGISTRY = Registry()


def spec_of(op: "Operation") -> OpKindSpec:
    return REGISTRY.get(op.name)


def is_terminator(op: "Operation") -> bool:
    spec = REGISTRY.specs.get(op.name)
    return spec is not None and Trait.IS_TERMINATOR in spec.traits


def has_trait(op: "Operation", trait: Trait) -> bool:
    spec = REGISTRY.specs.get(op.name)
    return spec is not None and trait in spec.traits
