"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``FRACSYM_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

from __future__ import annotations

import os

from fracsym import _pykernels

if os.environ.get("FRACSYM_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from fracsym import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

gl_convolve = _impl.gl_convolve
ml_series = _impl.ml_series
neumaier_sum = _impl.neumaier_sum

__all__ = ["BACKEND", "gl_convolve", "ml_series", "neumaier_sum"]
