"""Select the kernel implementation at import time.

The compiled extension is used when it imports; setting
``MULTIQUAD_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("MULTIQUAD_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

sieve_segment = _impl.sieve_segment
symbol_codes = _impl.symbol_codes
