"""Modular elimination kernels, compiled when available.

The compiled extension is used unless it failed to build or the environment
variable ``LEFSCHETZ_LAB_PURE`` is set to a non-empty value.
"""
import os

from lefschetz_lab._kernels import _pykernels as pure

compiled = None
if not os.environ.get("LEFSCHETZ_LAB_PURE"):
    try:
        from lefschetz_lab._kernels import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_active = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "pure"

rref = _active.rref
rank = _active.rank
line_ranks = _active.line_ranks

__all__ = ["BACKEND", "compiled", "pure", "rref", "rank", "line_ranks"]
