"""Kernel-lane selection: compiled extension when available, numpy fallback otherwise.

The environment variable MOMENTUMLAB_KERNELS overrides the choice:
"compiled" requires the extension (ImportError if missing), "pure" forces
the numpy lane, anything else (or unset) means auto.
"""

import os

from . import _pykernels

_choice = os.environ.get("MOMENTUMLAB_KERNELS", "auto").strip().lower()

_impl = None
if _choice != "pure":
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _pykernels

relu_forward = _impl.relu_forward
relu_grad = _impl.relu_grad
gram_counts = _impl.gram_counts
jacobi_extremes = _impl.jacobi_extremes


def active_lane():
    """Name of the kernel lane in use: "compiled" or "pure"."""
    return _impl.LANE
