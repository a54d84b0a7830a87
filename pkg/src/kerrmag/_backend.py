"""Pick the integration kernel at import time.

The compiled ``_kernel`` is preferred; set ``KERRMAG_PURE_PYTHON=1`` to force
the pure-Python twin.
"""
import os

from . import _kernel_py

if os.environ.get("KERRMAG_PURE_PYTHON", "") not in ("", "0"):
    kernel = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as kernel
        BACKEND = "cython"
    except ImportError:
        kernel = _kernel_py
        BACKEND = "python"

CONVERGED = _kernel_py.CONVERGED
HORIZON = _kernel_py.HORIZON
DIVERGED = _kernel_py.DIVERGED
NONFINITE = _kernel_py.NONFINITE
STEP_UNDERFLOW = _kernel_py.STEP_UNDERFLOW
