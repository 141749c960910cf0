"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``POLYLAT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("POLYLAT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

class_sums = _impl.class_sums
owen_scramble = _impl.owen_scramble
warnock_rows = _impl.warnock_rows

span = _pykernels.span
bit_length = _pykernels.bit_length

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
