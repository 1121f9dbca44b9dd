"""Hot loops for the finite effect-algebra code.

The compiled extension ``_ckernels`` is used when it was built and
imports cleanly; otherwise the pure-Python twins in ``_pykernels`` are
used. Set ``EFFECTALG_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("EFFECTALG_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

ea_violations = _impl.ea_violations
enumerate_state_operators = _impl.enumerate_state_operators

__all__ = ["BACKEND", "ea_violations", "enumerate_state_operators"]
