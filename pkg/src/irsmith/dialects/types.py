"""Type generators. They return a type and never touch the module."""

from __future__ import annotations

from typing import TYPE_CHECKING

from irsmith.ir import I1, I32, I64, INDEX, Type, memref

if TYPE_CHECKING:
    from irsmith.builder import Builder

SCALAR_TYPES = (I1, I32, I64, INDEX)
# function arguments; i1 is left out so a function does not start with a
# ready-made condition value for every while loop in its body
ARG_TYPES = (I32, I64, INDEX)
MAX_MEMREF_SIZE = 8


def sample_int_type(b: Builder) -> Type:
    return b.rng.choice(SCALAR_TYPES)


def sample_arg_type(b: Builder) -> Type:
    return b.rng.choice(ARG_TYPES)


def sample_memref_type(b: Builder) -> Type:
    return memref(b.rng.randint(1, MAX_MEMREF_SIZE))
