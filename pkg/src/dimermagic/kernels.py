"""Selects the compiled pricing kernels when available, else the numpy fallback.

Set ``DIMERMAGIC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pricing_py

BACKEND = "numpy"
_impl = _pricing_py

if os.environ.get("DIMERMAGIC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _pricing as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

column_dots = _impl.column_dots
price_dantzig = _impl.price_dantzig
price_bland = _impl.price_bland
max_abs_dot = _impl.max_abs_dot
