"""Backend selection for the hot loops.

The Cython extension is used when it was built; otherwise, or when the
environment variable ``QCORESET_PURE_PYTHON`` is set to a non-empty value,
the numpy fallback is used. Both expose the same four functions.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if not os.environ.get("QCORESET_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

kcenter_sweep = _impl.kcenter_sweep
assign_nearest = _impl.assign_nearest
meb_iterate = _impl.meb_iterate
jacobi_eigenvalues = _impl.jacobi_eigenvalues


def backends():
    """Mapping of every importable backend name to its module."""
    found = {"python": _fallback}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
