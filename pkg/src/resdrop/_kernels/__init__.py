"""Conv packing kernels: compiled extension when built, numpy fallback otherwise.

The backend is chosen once at import. Set RESDROP_KERNEL=numpy or
RESDROP_KERNEL=cython to force one (cython raises if the extension was not
built). Both produce identical arrays; benchmarks/bench_kernels.py compares
their speed.
"""

import os

from . import numpy_backend

_requested = os.environ.get("RESDROP_KERNEL", "auto").lower()
if _requested not in ("auto", "cython", "numpy"):
    raise ValueError(f"RESDROP_KERNEL must be auto, cython or numpy, got {_requested!r}")

_compiled = None
if _requested in ("auto", "cython"):
    try:
        from . import _conv_cy as _compiled
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "RESDROP_KERNEL=cython but the compiled kernel is not built; "
                "install the package (pip install -e . --no-build-isolation) "
                "or set RESDROP_KERNEL=numpy"
            ) from None

if _compiled is not None:
    BACKEND = "cython"
    im2col = _compiled.im2col
    col2im = _compiled.col2im
else:
    BACKEND = "numpy"
    im2col = numpy_backend.im2col
    col2im = numpy_backend.col2im


def backend_name() -> str:
    return BACKEND
