"""Backend selection for the statevector gate kernels.

Prefers the compiled Cython extension; falls back to the pure-numpy
implementation.  Set ``PDOENC_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("PDOENC_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

apply_1q = _impl.apply_1q
apply_diag = _impl.apply_diag
apply_perm = _impl.apply_perm
apply_dense = _impl.apply_dense
