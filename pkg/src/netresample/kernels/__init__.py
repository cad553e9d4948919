"""Backend selection for the hot kernels.

The compiled extension (`_ckernels`, built from Cython) is used when it
imports cleanly; otherwise the pure numpy/scipy backend takes over.  Set
``NETRESAMPLE_BACKEND=python`` or ``=compiled`` to force one (forcing
``compiled`` raises if the extension is missing).
"""

import os

_requested = os.environ.get("NETRESAMPLE_BACKEND", "").strip().lower()

if _requested not in ("", "python", "compiled"):
    raise ImportError(
        f"NETRESAMPLE_BACKEND={_requested!r} not understood; "
        "use 'python' or 'compiled'")

if _requested == "python":
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND_NAME
unsigned_orbit_counts = _impl.unsigned_orbit_counts
signed_orbit_counts = _impl.signed_orbit_counts
lasso_cd = _impl.lasso_cd


def backends():
    """Mapping of available backend name -> module (for benchmarks/tests)."""
    from . import _pykernels
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out
