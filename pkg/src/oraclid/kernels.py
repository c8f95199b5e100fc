"""Kernel backend selection.

The compiled module is used when it imported cleanly and ``ORACLID_PURE``
is not set to ``1``; otherwise the numpy versions are used. ``BACKEND``
names the active choice.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and os.environ.get("ORACLID_PURE") != "1":
    _impl = _ckernels
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "numpy"

phase_flip = _impl.phase_flip
diffuse = _impl.diffuse
grover_iterate = _impl.grover_iterate
walsh_hadamard = _impl.walsh_hadamard


def backends():
    """Available kernel modules keyed by name (used by tests and the benchmark)."""
    out = {"numpy": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out
