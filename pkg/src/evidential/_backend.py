"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
kernels are loaded. Set ``EVIDENTIAL_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("EVIDENTIAL_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _pure as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pure as _impl

BACKEND = _impl.BACKEND
combine_masses = _impl.combine_masses
pignistic_masses = _impl.pignistic_masses
singleton_support = _impl.singleton_support
