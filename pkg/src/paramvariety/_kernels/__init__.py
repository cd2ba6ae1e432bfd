"""Kernel backend selection.

Prefers the compiled Cython module; falls back to the pure-Python twin when
the extension is missing or PARAMVARIETY_PURE_PYTHON is set. Both expose the
same functions over plain dicts/tuples, so everything above this layer is
backend-agnostic. `BACKEND` records which one is active.
"""

import os

if os.environ.get("PARAMVARIETY_PURE_PYTHON"):
    from . import _pure as _impl
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl
        BACKEND = "pure"

expvec_add = _impl.expvec_add
expvec_sub = _impl.expvec_sub
expvec_divides = _impl.expvec_divides
expvec_lcm = _impl.expvec_lcm
expvec_min = _impl.expvec_min
dict_add = _impl.dict_add
dict_sub = _impl.dict_sub
dict_neg = _impl.dict_neg
dict_scale = _impl.dict_scale
dict_mul = _impl.dict_mul
dict_term_mul = _impl.dict_term_mul
dict_axpy = _impl.dict_axpy
dict_int_content = _impl.dict_int_content
dict_div_int = _impl.dict_div_int

__all__ = [
    "BACKEND",
    "expvec_add", "expvec_sub", "expvec_divides", "expvec_lcm", "expvec_min",
    "dict_add", "dict_sub", "dict_neg", "dict_scale", "dict_mul",
    "dict_term_mul", "dict_axpy", "dict_int_content", "dict_div_int",
]
