"""Kernel backend selection.

The compiled extension is preferred when importable; setting the
environment variable ``HUSIMI_KIT_PURE_PYTHON`` (to anything non-empty)
forces the numpy fallback.  ``HUSIMI_KIT_THREADS`` caps BLAS/FFT thread
pools; it must take effect before numpy spins them up, so the CLI entry
point exports it first thing (see :mod:`husimi_kit.cli`).
"""

import os

if os.environ.get("HUSIMI_KIT_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

hermite_functions = _impl.hermite_functions
coherent_amplitudes = _impl.coherent_amplitudes


def backend_name() -> str:
    """'compiled' when the Cython kernels are active, else 'python'."""
    return _impl.BACKEND
