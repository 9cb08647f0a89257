"""Op generators for the arith, scf, func and mem dialects.

Importing this package registers every op kind in the global registry.
"""

from irsmith.dialects import arith, func, mem, scf  # noqa: F401
from irsmith.dialects.types import sample_int_type, sample_memref_type

__all__ = ["arith", "func", "mem", "scf", "sample_int_type", "sample_memref_type"]
