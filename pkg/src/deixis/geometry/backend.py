"""Selects the geometry kernel backend at import time.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is missing or ``DEIXIS_PURE_PYTHON=1`` is set.
"""

import os

if os.environ.get("DEIXIS_PURE_PYTHON") == "1":
    from . import _pykern as kernels
else:
    try:
        from . import _fastkern as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _pykern as kernels  # type: ignore[no-redef]

BACKEND = kernels.IMPLEMENTATION


def load_backend(name):
    """Return a specific kernel module ("python" or "compiled"); for benchmarks."""
    if name == "python":
        from . import _pykern
        return _pykern
    if name == "compiled":
        from . import _fastkern
        return _fastkern
    raise ValueError(f"unknown kernel backend {name!r}")
