"""Hot loops (GIG sampling, Gibbs chain) with a compiled and a pure-Python backend.

The compiled extension ``_ckernels`` is used when it imports; otherwise, or
when ``RNBAYES_BACKEND=python`` is set, the pure-Python twin is used.  Both
produce identical draws for the same generator state.
"""

import os

from . import _pykernels
from ._pykernels import MU_FLAT, MU_NORMAL, MU_POINT, S2_GIG, S2_POINT

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if os.environ.get("RNBAYES_BACKEND", "").lower() == "python" or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]
gig_fill = _impl.gig_fill
normal_fill = _impl.normal_fill
gibbs_chain = _impl.gibbs_chain

__all__ = [
    "BACKEND", "BACKENDS", "gig_fill", "normal_fill", "gibbs_chain",
    "MU_FLAT", "MU_NORMAL", "MU_POINT", "S2_GIG", "S2_POINT",
]
